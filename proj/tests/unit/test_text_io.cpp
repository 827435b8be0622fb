#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "artinfluence/text_io.hpp"

using namespace artinfluence;

TEST(TextIo, DoublesRoundTripBitExact) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1e6, 1e6);
  std::vector<double> values{0.0, -0.0, 1.0 / 3.0, 1e-300, 5e-324, std::numeric_limits<double>::max(), 0.1};
  for (int i = 0; i < 2000; ++i) values.push_back(u(rng) * std::pow(10.0, static_cast<int>(rng() % 40) - 20));
  for (double v : values) {
    const auto back = text::parse_double(text::format_double(v));
    ASSERT_TRUE(back.has_value());
    EXPECT_EQ(std::signbit(*back), std::signbit(v));
    EXPECT_EQ(*back, v) << text::format_double(v);
  }
}

TEST(TextIo, InfinityHasATokenAndNaNIsRejected) {
  const double inf = std::numeric_limits<double>::infinity();
  EXPECT_EQ(text::format_double(inf), "inf");
  EXPECT_EQ(*text::parse_double("inf"), inf);
  EXPECT_EQ(*text::parse_double("-inf"), -inf);
  EXPECT_FALSE(text::parse_double("nan").has_value());
  EXPECT_THROW(text::format_double(std::nan("")), InvalidInput);
  EXPECT_FALSE(text::parse_double("1.5x").has_value());
  EXPECT_FALSE(text::parse_double("").has_value());
}

TEST(TextIo, CsvQuotingRoundTrips) {
  const std::vector<std::string> fields{"plain", "with,comma", "with \"quote\"", "", "tail"};
  const auto back = text::split_csv(text::join_csv(fields));
  ASSERT_TRUE(back.has_value());
  EXPECT_EQ(*back, fields);
  EXPECT_FALSE(text::split_csv("\"unterminated").has_value());
}

TEST(TextIo, KeyedReaderRejectsWrongTypeAndTrailingGarbage) {
  text::KeyedWriter w("thing", 1);
  w.field("name", "x");
  const std::string s = w.str();
  EXPECT_THROW(text::KeyedReader("src", s, "other", 1), ParseError);
  EXPECT_THROW(text::KeyedReader("src", s, "thing", 2), ParseError);
  text::KeyedReader r("src", s, "thing", 1);
  EXPECT_EQ(r.string_field("name"), "x");
  r.finish();
  text::KeyedReader r2("src", s + "extra 1\n", "thing", 1);
  EXPECT_EQ(r2.string_field("name"), "x");
  EXPECT_THROW(r2.finish(), ParseError);
}

TEST(TextIo, HashIsStable) {
  EXPECT_EQ(text::hex64(text::fnv1a64("")), "cbf29ce484222325");
  EXPECT_EQ(text::hex64(text::fnv1a64("a")), "af63dc4c8601ec8c");
}

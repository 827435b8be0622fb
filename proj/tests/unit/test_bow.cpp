#include <algorithm>
#include <random>

#include <gtest/gtest.h>

#include "artinfluence/bow.hpp"
#include "oracles.hpp"

using namespace artinfluence;

namespace {

std::vector<FeatureVector> blobs(std::uint64_t seed, std::size_t per, const std::vector<FeatureVector>& centres,
                                 double spread) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, spread);
  std::vector<FeatureVector> out;
  for (std::size_t i = 0; i < per; ++i)
    for (const auto& c : centres) {
      FeatureVector p = c;
      for (auto& v : p) v += n(rng);
      out.push_back(p);
    }
  return out;
}

std::size_t brute_nearest(const FeatureVector& x, const std::vector<FeatureVector>& cs) {
  std::size_t best = 0;
  for (std::size_t c = 1; c < cs.size(); ++c)
    if (oracle::euclid(x, cs[c]) < oracle::euclid(x, cs[best])) best = c;
  return best;
}

}  // namespace

TEST(KMeans, InertiaNeverIncreases) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    std::mt19937_64 rng(seed);
    const auto pts = oracle::random_points(rng, 300, 4);
    const auto r = bow::kmeans_fit(pts, {12, seed, 100, 0.0});
    for (std::size_t i = 1; i < r.inertia_history.size(); ++i)
      EXPECT_LE(r.inertia_history[i], r.inertia_history[i - 1] * (1 + 1e-12)) << "seed " << seed << " iter " << i;
  }
}

TEST(KMeans, RecoversWellSeparatedCentres) {
  const std::vector<FeatureVector> centres{{0, 0}, {10, 0}, {0, 10}, {10, 10}};
  const auto pts = blobs(5, 50, centres, 0.3);
  const auto cb = bow::kmeans_codebook(pts, {4, 1, 100, 1e-9});
  ASSERT_EQ(cb.size(), 4u);
  for (const auto& c : centres) {
    double best = 1e9;
    for (const auto& k : cb.centroids) best = std::min(best, oracle::euclid(c, k));
    EXPECT_LT(best, 0.2);
  }
}

TEST(KMeans, SameSeedSameCodebook) {
  std::mt19937_64 rng(2);
  const auto pts = oracle::random_points(rng, 200, 8);
  EXPECT_EQ(bow::kmeans_codebook(pts, {10, 42, 50, 1e-6}), bow::kmeans_codebook(pts, {10, 42, 50, 1e-6}));
  EXPECT_NE(bow::kmeans_codebook(pts, {10, 42, 50, 1e-6}).centroids,
            bow::kmeans_codebook(pts, {10, 43, 50, 1e-6}).centroids);
}

TEST(KMeans, TooFewDescriptorsIsInsufficientData) {
  std::vector<FeatureVector> pts{{0.0}, {1.0}, {2.0}};
  EXPECT_THROW(bow::kmeans_fit(pts, {4, 0, 10, 1e-6}), InsufficientData);
  std::vector<FeatureVector> dup{{1.0}, {1.0}, {1.0}, {2.0}};
  EXPECT_THROW(bow::kmeans_fit(dup, {3, 0, 10, 1e-6}), InsufficientData);
}

TEST(KMeans, CentroidsAreMeansOfTheirAssignedPoints) {
  std::mt19937_64 rng(9);
  const auto pts = oracle::random_points(rng, 150, 3);
  const auto cb = bow::kmeans_codebook(pts, {5, 3, 500, 0.0});
  std::vector<FeatureVector> sums(5, FeatureVector(3, 0.0));
  std::vector<int> n(5, 0);
  for (const auto& p : pts) {
    const auto c = brute_nearest(p, cb.centroids);
    for (int d = 0; d < 3; ++d) sums[c][d] += p[d];
    ++n[c];
  }
  for (int c = 0; c < 5; ++c) {
    ASSERT_GT(n[c], 0);
    for (int d = 0; d < 3; ++d) EXPECT_NEAR(cb.centroids[c][d], sums[c][d] / n[c], 1e-9);
  }
}

TEST(Quantize, MatchesBruteForceNearestCentroid) {
  std::mt19937_64 rng(4);
  const auto cents = oracle::random_points(rng, 16, 5);
  const bow::Codebook cb{cents, 0};
  const auto desc = oracle::random_points(rng, 400, 5);
  const auto h = bow::quantize(desc, cb);
  std::vector<std::size_t> expect(16, 0);
  for (const auto& d : desc) ++expect[brute_nearest(d, cents)];
  EXPECT_EQ(h.counts, expect);
  EXPECT_EQ(h.total(), desc.size());
  double s = 0.0;
  for (double v : h.normalized) {
    EXPECT_GE(v, 0.0);
    s += v;
  }
  EXPECT_NEAR(s, 1.0, 1e-12);
}

TEST(Quantize, TiesGoToLowestIndex) {
  const bow::Codebook cb{{{1.0}, {-1.0}, {1.0}}, 0};
  const auto h = bow::quantize(std::vector<FeatureVector>{{0.0}, {1.0}}, cb);
  EXPECT_EQ(h.counts, (std::vector<std::size_t>{2, 0, 0}));
}

TEST(Quantize, EmptyPaintingGivesZeroHistogram) {
  const bow::Codebook cb{{{1.0}, {2.0}}, 0};
  const auto h = bow::quantize(std::vector<FeatureVector>{}, cb);
  EXPECT_TRUE(h.empty);
  EXPECT_EQ(h.normalized, (std::vector<double>{0.0, 0.0}));
  EXPECT_THROW(bow::quantize(std::vector<FeatureVector>{{1.0, 2.0}}, cb), DimensionMismatch);
}

#ifndef ARTINFLUENCE_TEXT_IO_HPP
#define ARTINFLUENCE_TEXT_IO_HPP

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "artinfluence/error.hpp"

namespace artinfluence::text {

/// Shortest representation that round-trips bit-exactly; +inf is "inf".
/// NaN is never written.
inline std::string format_double(double v) {
  if (std::isnan(v)) throw InvalidInput("NaN cannot be serialized");
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

inline std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s == "inf" || s == "+inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || std::isnan(v)) return std::nullopt;
  return v;
}

template <class Int>
std::optional<Int> parse_int(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  Int v{};
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

/// Splits one CSV record. Double-quoted fields may contain commas and
/// doubled quotes; embedded newlines are not supported.
inline std::optional<std::vector<std::string>> split_csv(std::string_view line) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  bool field_was_quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      if (!cur.empty() || field_was_quoted) return std::nullopt;
      quoted = true;
      field_was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
      field_was_quoted = false;
    } else {
      if (field_was_quoted) return std::nullopt;
      cur.push_back(c);
    }
  }
  if (quoted) return std::nullopt;
  fields.push_back(std::move(cur));
  return fields;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

inline std::string join_csv(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += csv_field(fields[i]);
  }
  return out;
}

inline std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOError("cannot write " + path);
  out << contents;
  if (!out) throw IOError("write failed for " + path);
}

inline std::vector<std::string> split_lines(const std::string& contents) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < contents.size()) {
    std::size_t nl = contents.find('\n', start);
    if (nl == std::string::npos) nl = contents.size();
    std::string line = contents.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = nl + 1;
  }
  return lines;
}

/// 64-bit FNV-1a, used for manifest fingerprints.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  char buf[17];
  static constexpr char kDigits[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = kDigits[v & 0xF];
    v >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

/// Token escaping for string lists: whitespace and '%' become %XX, and the
/// empty string is written as "%-".
inline std::string escape_token(const std::string& s) {
  if (s.empty()) return "%-";
  std::string out;
  for (char c : s) {
    if (c == '%' || c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      static const char* hex = "0123456789ABCDEF";
      out += '%';
      out += hex[(static_cast<unsigned char>(c) >> 4) & 0xF];
      out += hex[static_cast<unsigned char>(c) & 0xF];
    } else {
      out += c;
    }
  }
  return out;
}

inline std::optional<std::string> unescape_token(const std::string& s) {
  if (s == "%-") return std::string{};
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '%') {
      out += s[i];
      continue;
    }
    if (i + 2 >= s.size()) return std::nullopt;
    unsigned v = 0;
    auto res = std::from_chars(s.data() + i + 1, s.data() + i + 3, v, 16);
    if (res.ec != std::errc() || res.ptr != s.data() + i + 3) return std::nullopt;
    out += static_cast<char>(v);
    i += 2;
  }
  return out;
}

/// Line-oriented "key value..." writer with a leading type/version tag.
class KeyedWriter {
 public:
  KeyedWriter(const std::string& type, int version) {
    out_ << "artinfluence " << type << " v" << version << '\n';
  }

  KeyedWriter& field(const std::string& key, const std::string& value) {
    out_ << key << ' ' << value << '\n';
    return *this;
  }
  KeyedWriter& field(const std::string& key, double value) { return field(key, format_double(value)); }
  KeyedWriter& field(const std::string& key, long long value) { return field(key, std::to_string(value)); }
  KeyedWriter& field(const std::string& key, int value) { return field(key, std::to_string(value)); }
  KeyedWriter& field(const std::string& key, std::size_t value) { return field(key, std::to_string(value)); }

  KeyedWriter& list(const std::string& key, const std::vector<std::string>& values) {
    out_ << key << ' ' << values.size();
    for (const auto& v : values) out_ << ' ' << escape_token(v);
    out_ << '\n';
    return *this;
  }

  KeyedWriter& list(const std::string& key, const std::vector<double>& values) {
    out_ << key << ' ' << values.size();
    for (double v : values) out_ << ' ' << format_double(v);
    out_ << '\n';
    return *this;
  }

  template <class Matrix>
  KeyedWriter& matrix(const std::string& key, const Matrix& m) {
    out_ << key << ' ' << m.rows() << ' ' << m.cols() << '\n';
    for (long r = 0; r < static_cast<long>(m.rows()); ++r) {
      for (long c = 0; c < static_cast<long>(m.cols()); ++c) {
        if (c) out_ << ' ';
        out_ << format_double(m(r, c));
      }
      out_ << '\n';
    }
    return *this;
  }

  std::string str() const { return out_.str() + "end\n"; }

 private:
  std::ostringstream out_;
};

/// Sequential reader for KeyedWriter output. Keys must appear in the order
/// they were written.
class KeyedReader {
 public:
  KeyedReader(std::string source, const std::string& contents, const std::string& type, int version)
      : source_(std::move(source)), lines_(split_lines(contents)) {
    auto head = next_tokens();
    if (head.size() != 3 || head[0] != "artinfluence" || head[1] != type)
      fail("expected header 'artinfluence " + type + " v" + std::to_string(version) + "'");
    if (head[2] != "v" + std::to_string(version)) fail("unsupported version " + head[2]);
  }

  std::vector<std::string> expect(const std::string& key) {
    auto tokens = next_tokens();
    if (tokens.empty() || tokens[0] != key) fail("expected key '" + key + "'");
    tokens.erase(tokens.begin());
    return tokens;
  }

  std::string string_field(const std::string& key) {
    auto t = expect(key);
    if (t.size() != 1) fail("key '" + key + "' expects one value");
    return t[0];
  }

  double double_field(const std::string& key) {
    auto v = parse_double(string_field(key));
    if (!v) fail("bad number for '" + key + "'");
    return *v;
  }

  template <class Int = long long>
  Int int_field(const std::string& key) {
    auto v = parse_int<Int>(string_field(key));
    if (!v) fail("bad integer for '" + key + "'");
    return *v;
  }

  std::vector<std::string> string_list(const std::string& key) {
    auto t = expect(key);
    if (t.empty()) fail("missing count for '" + key + "'");
    auto n = parse_int<std::size_t>(t[0]);
    if (!n || *n != t.size() - 1) fail("count mismatch for '" + key + "'");
    std::vector<std::string> out;
    for (std::size_t i = 1; i < t.size(); ++i) {
      auto v = unescape_token(t[i]);
      if (!v) fail("bad escape in '" + key + "'");
      out.push_back(std::move(*v));
    }
    return out;
  }

  std::vector<double> double_list(const std::string& key) {
    std::vector<double> out;
    for (const auto& s : string_list(key)) {
      auto v = parse_double(s);
      if (!v) fail("bad number in '" + key + "'");
      out.push_back(*v);
    }
    return out;
  }

  template <class Matrix>
  Matrix matrix(const std::string& key) {
    auto t = expect(key);
    if (t.size() != 2) fail("matrix '" + key + "' expects rows and cols");
    auto rows = parse_int<long>(t[0]);
    auto cols = parse_int<long>(t[1]);
    if (!rows || !cols || *rows < 0 || *cols < 0) fail("bad shape for '" + key + "'");
    Matrix m(*rows, *cols);
    for (long r = 0; r < *rows; ++r) {
      auto row = next_tokens();
      if (static_cast<long>(row.size()) != *cols) fail("row width mismatch in '" + key + "'");
      for (long c = 0; c < *cols; ++c) {
        auto v = parse_double(row[c]);
        if (!v) fail("bad number in '" + key + "'");
        m(r, c) = *v;
      }
    }
    return m;
  }

  void finish() {
    auto t = next_tokens();
    if (t.size() != 1 || t[0] != "end") fail("expected 'end'");
    while (line_ < lines_.size())
      if (!split_ws(lines_[line_++]).empty()) fail("content after 'end'");
  }

  [[noreturn]] void fail(const std::string& why) const { throw ParseError(source_, line_, why); }

 private:
  std::vector<std::string> next_tokens() {
    while (line_ < lines_.size()) {
      auto t = split_ws(lines_[line_++]);
      if (!t.empty()) return t;
    }
    ++line_;
    fail("unexpected end of file");
  }

  std::string source_;
  std::vector<std::string> lines_;
  std::size_t line_ = 0;
};

}  // namespace artinfluence::text

#endif  // ARTINFLUENCE_TEXT_IO_HPP

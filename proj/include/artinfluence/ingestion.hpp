#ifndef ARTINFLUENCE_INGESTION_HPP
#define ARTINFLUENCE_INGESTION_HPP

// Readers and writers for the text input formats:
//
//   features:     "family,<name>" / "dim,<D>" then one row per painting:
//                 painting_id,artist_id,title,year,v1,...,vD   (year may be empty)
//   artists:      header "artist_id,name,period_start,period_end,style"
//   ground truth: optional header "influenced,influencer", then one pair per line
//   descriptors:  painting_id,v1,...,vd   (one row per interest point)

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "artinfluence/core_model.hpp"
#include "artinfluence/error.hpp"
#include "artinfluence/text_io.hpp"

namespace artinfluence {

inline constexpr std::size_t kMaxDescriptorsPerPainting = 3000;

using DescriptorMap = std::map<std::string, std::vector<FeatureVector>>;

namespace detail {

inline bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

inline std::vector<ArtistRecord> parse_artists(const std::string& path) {
  const auto lines = text::split_lines(text::read_file(path));
  std::vector<ArtistRecord> artists;
  bool header_seen = false;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (blank(lines[i])) continue;
    auto f = text::split_csv(lines[i]);
    if (!f) throw ParseError(path, i + 1, "malformed CSV");
    if (!header_seen) {
      if (*f != std::vector<std::string>{"artist_id", "name", "period_start", "period_end", "style"})
        throw ParseError(path, i + 1, "expected header artist_id,name,period_start,period_end,style");
      header_seen = true;
      continue;
    }
    if (f->size() != 5) throw ParseError(path, i + 1, "expected 5 fields");
    auto start = text::parse_int<int>((*f)[2]);
    auto end = text::parse_int<int>((*f)[3]);
    if (!start || !end) throw ParseError(path, i + 1, "period years must be integers");
    artists.push_back({(*f)[0], (*f)[1], *start, *end, (*f)[4]});
  }
  if (!header_seen) throw ParseError(path, 1, "missing header");
  return artists;
}

}  // namespace detail

namespace detail {

inline Dataset parse_dataset(const std::string& features_path, const std::string& artists_path, bool strict) {
  auto artists = detail::parse_artists(artists_path);
  std::set<std::string> known;
  for (const auto& a : artists) known.insert(a.artist_id);

  const auto lines = text::split_lines(text::read_file(features_path));
  std::size_t i = 0;
  auto next_line = [&]() -> std::optional<std::size_t> {
    while (i < lines.size() && detail::blank(lines[i])) ++i;
    if (i == lines.size()) return std::nullopt;
    return i++;
  };

  auto family_line = next_line();
  if (!family_line) throw ParseError(features_path, 1, "missing 'family' header");
  auto fam = text::split_csv(lines[*family_line]);
  if (!fam || fam->size() != 2 || (*fam)[0] != "family")
    throw ParseError(features_path, *family_line + 1, "expected 'family,<name>'");
  auto dim_line = next_line();
  if (!dim_line) throw ParseError(features_path, *family_line + 2, "missing 'dim' header");
  auto dimf = text::split_csv(lines[*dim_line]);
  std::optional<std::size_t> dim;
  if (dimf && dimf->size() == 2 && (*dimf)[0] == "dim") dim = text::parse_int<std::size_t>((*dimf)[1]);
  if (!dim || *dim == 0) throw ParseError(features_path, *dim_line + 1, "expected 'dim,<D>' with D >= 1");

  std::vector<PaintingRecord> paintings;
  while (auto li = next_line()) {
    const std::size_t lineno = *li + 1;
    auto f = text::split_csv(lines[*li]);
    if (!f || f->size() < 4) throw ParseError(features_path, lineno, "malformed feature row");
    if (f->size() - 4 != *dim)
      throw DimensionMismatch(features_path + ":" + std::to_string(lineno) + ": row has " +
                              std::to_string(f->size() - 4) + " values, header declares " +
                              std::to_string(*dim));
    PaintingRecord p;
    p.painting_id = (*f)[0];
    p.artist_id = (*f)[1];
    p.title = (*f)[2];
    if (!(*f)[3].empty()) {
      auto y = text::parse_int<int>((*f)[3]);
      if (!y) throw ParseError(features_path, lineno, "year must be an integer or empty");
      p.year = *y;
    }
    p.features.reserve(*dim);
    for (std::size_t c = 4; c < f->size(); ++c) {
      auto v = text::parse_double((*f)[c]);
      if (!v || !std::isfinite(*v)) throw ParseError(features_path, lineno, "non-finite or malformed value");
      p.features.push_back(*v);
    }
    if (strict && !known.count(p.artist_id))
      throw ReferentialError(features_path + ":" + std::to_string(lineno) + ": unknown artist_id \"" +
                             p.artist_id + "\"");
    paintings.push_back(std::move(p));
  }

  return Dataset(std::move(artists), std::move(paintings), (*fam)[1]);
}

}  // namespace detail

/// Parses both files without the referential checks; run validate_dataset
/// on the result to list every violation.
inline Dataset read_dataset(const std::string& features_path, const std::string& artists_path) {
  return detail::parse_dataset(features_path, artists_path, false);
}

/// Loads painting features plus artist metadata and rejects the pair on any
/// validation violation.
inline Dataset load_dataset(const std::string& features_path, const std::string& artists_path) {
  Dataset ds = detail::parse_dataset(features_path, artists_path, true);
  auto report = validate_dataset(ds);
  if (!report.empty()) throw ReferentialError(report.front().record_id + ": " + report.front().reason);
  return ds;
}

/// Loads influence pairs; duplicates are collapsed and counted. When a
/// dataset is supplied, both ids of every pair must resolve in it.
inline GroundTruthInfluences load_ground_truth(const std::string& path, const Dataset* dataset = nullptr,
                                               bool strict = true) {
  const auto lines = text::split_lines(text::read_file(path));
  GroundTruthInfluences gt;
  std::set<InfluencePair> seen;
  bool first = true;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (detail::blank(lines[i])) continue;
    auto f = text::split_csv(lines[i]);
    if (!f || f->size() != 2 || (*f)[0].empty() || (*f)[1].empty())
      throw ParseError(path, i + 1, "expected 'influenced,influencer'");
    if (first && (*f)[0] == "influenced" && (*f)[1] == "influencer") {
      first = false;
      continue;
    }
    first = false;
    InfluencePair pair{(*f)[0], (*f)[1]};
    if (strict && pair.influenced == pair.influencer)
      throw ReferentialError(path + ":" + std::to_string(i + 1) + ": self influence \"" + pair.influenced + "\"");
    if (strict && dataset) {
      for (const auto* id : {&pair.influenced, &pair.influencer})
        if (!dataset->artist_index(*id))
          throw ReferentialError(path + ":" + std::to_string(i + 1) + ": unknown artist_id \"" + *id + "\"");
    }
    if (!seen.insert(pair).second) {
      ++gt.duplicates_collapsed;
      continue;
    }
    gt.pairs.push_back(std::move(pair));
  }
  return gt;
}

/// Pairs as written, for validation: self pairs and unknown ids are kept.
inline GroundTruthInfluences read_ground_truth(const std::string& path) { return load_ground_truth(path, nullptr, false); }

inline DescriptorMap load_descriptors(const std::string& path) {
  const auto lines = text::split_lines(text::read_file(path));
  DescriptorMap out;
  std::optional<std::size_t> width;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (detail::blank(lines[i])) continue;
    auto f = text::split_csv(lines[i]);
    if (!f || f->size() < 2 || (*f)[0].empty()) throw ParseError(path, i + 1, "malformed descriptor row");
    if (!width) width = f->size() - 1;
    if (f->size() - 1 != *width)
      throw ParseError(path, i + 1, "descriptor width " + std::to_string(f->size() - 1) + " differs from " +
                                        std::to_string(*width));
    FeatureVector d;
    d.reserve(*width);
    for (std::size_t c = 1; c < f->size(); ++c) {
      auto v = text::parse_double((*f)[c]);
      if (!v || !std::isfinite(*v)) throw ParseError(path, i + 1, "non-finite or malformed value");
      d.push_back(*v);
    }
    auto& list = out[(*f)[0]];
    if (list.size() == kMaxDescriptorsPerPainting)
      throw TooManyDescriptors("painting \"" + (*f)[0] + "\" exceeds " +
                               std::to_string(kMaxDescriptorsPerPainting) + " descriptors (line " +
                               std::to_string(i + 1) + ")");
    list.push_back(std::move(d));
  }
  return out;
}

// Writers, the exact inverses of the readers above.

inline std::string format_features(const Dataset& ds) {
  std::string out = "family," + text::csv_field(ds.feature_family().empty() ? "unknown" : ds.feature_family()) +
                    "\ndim," + std::to_string(ds.dimension()) + "\n";
  for (const auto& p : ds.paintings()) {
    std::vector<std::string> f{p.painting_id, p.artist_id, p.title, p.year ? std::to_string(*p.year) : ""};
    for (double v : p.features) f.push_back(text::format_double(v));
    out += text::join_csv(f) + "\n";
  }
  return out;
}

inline std::string format_artists(const std::vector<ArtistRecord>& artists) {
  std::string out = "artist_id,name,period_start,period_end,style\n";
  for (const auto& a : artists)
    out += text::join_csv({a.artist_id, a.name, std::to_string(a.period_start), std::to_string(a.period_end),
                           a.style}) +
           "\n";
  return out;
}

inline std::string format_ground_truth(const GroundTruthInfluences& gt) {
  std::string out = "influenced,influencer\n";
  for (const auto& p : gt.pairs) out += p.influenced + "," + p.influencer + "\n";
  return out;
}

inline std::string format_descriptors(const DescriptorMap& descriptors) {
  std::string out;
  for (const auto& [id, list] : descriptors)
    for (const auto& d : list) {
      out += id;
      for (double v : d) out += "," + text::format_double(v);
      out += "\n";
    }
  return out;
}

}  // namespace artinfluence

#endif  // ARTINFLUENCE_INGESTION_HPP

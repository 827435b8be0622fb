#ifndef ARTINFLUENCE_CORE_MODEL_HPP
#define ARTINFLUENCE_CORE_MODEL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace artinfluence {

using FeatureVector = std::vector<double>;

/// One artwork. The year is metadata only; no computation reads it.
struct PaintingRecord {
  std::string painting_id;
  std::string artist_id;
  std::string title;
  std::optional<int> year;
  FeatureVector features;

  bool operator==(const PaintingRecord&) const = default;
};

struct ArtistRecord {
  std::string artist_id;
  std::string name;
  int period_start = 0;
  int period_end = 0;
  std::string style;

  bool operator==(const ArtistRecord&) const = default;
};

/// Directed pair: `influenced` is potentially influenced by `influencer`.
struct InfluencePair {
  std::string influenced;
  std::string influencer;

  auto operator<=>(const InfluencePair&) const = default;
};

struct GroundTruthInfluences {
  std::vector<InfluencePair> pairs;
  std::size_t duplicates_collapsed = 0;
};

/// Immutable container of artists and paintings. Paintings are grouped by
/// artist in painting-table order; artists keep their table order, which is
/// the node order of every artist-level matrix.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::vector<ArtistRecord> artists, std::vector<PaintingRecord> paintings,
          std::string feature_family = {})
      : artists_(std::move(artists)),
        paintings_(std::move(paintings)),
        family_(std::move(feature_family)) {
    for (std::size_t a = 0; a < artists_.size(); ++a) artist_index_.emplace(artists_[a].artist_id, a);
    for (std::size_t p = 0; p < paintings_.size(); ++p) {
      grouping_[paintings_[p].artist_id].push_back(p);
      painting_index_.emplace(paintings_[p].painting_id, p);
    }
    if (!paintings_.empty()) dim_ = paintings_.front().features.size();
  }

  const std::vector<ArtistRecord>& artists() const noexcept { return artists_; }
  const std::vector<PaintingRecord>& paintings() const noexcept { return paintings_; }
  const std::string& feature_family() const noexcept { return family_; }
  std::size_t dimension() const noexcept { return dim_; }
  std::size_t artist_count() const noexcept { return artists_.size(); }
  std::size_t painting_count() const noexcept { return paintings_.size(); }

  std::optional<std::size_t> artist_index(const std::string& id) const {
    auto it = artist_index_.find(id);
    if (it == artist_index_.end()) return std::nullopt;
    return it->second;
  }

  std::optional<std::size_t> painting_index(const std::string& id) const {
    auto it = painting_index_.find(id);
    if (it == painting_index_.end()) return std::nullopt;
    return it->second;
  }

  /// Painting indices of one artist; empty if the artist has no paintings.
  const std::vector<std::size_t>& paintings_of(const std::string& artist_id) const {
    static const std::vector<std::size_t> kNone;
    auto it = grouping_.find(artist_id);
    return it == grouping_.end() ? kNone : it->second;
  }

  const std::map<std::string, std::vector<std::size_t>>& grouping() const noexcept { return grouping_; }

 private:
  std::vector<ArtistRecord> artists_;
  std::vector<PaintingRecord> paintings_;
  std::string family_;
  std::size_t dim_ = 0;
  std::map<std::string, std::size_t> artist_index_;
  std::map<std::string, std::size_t> painting_index_;
  std::map<std::string, std::vector<std::size_t>> grouping_;
};

struct Violation {
  std::string record_id;
  std::string reason;

  bool operator==(const Violation&) const = default;
};

using ValidationReport = std::vector<Violation>;

/// Identifiers are written unquoted into keyed text files, so they must be
/// non-empty and free of whitespace, commas and quotes.
inline bool is_valid_identifier(const std::string& id) {
  if (id.empty()) return false;
  return std::none_of(id.begin(), id.end(), [](char c) {
    return c == ',' || c == '"' || c == ' ' || c == '\t' || c == '\n' || c == '\r';
  });
}

/// Collects every invariant violation of the dataset (and ground truth, if
/// given). Never throws; an empty report means the input is valid.
inline ValidationReport validate_dataset(const Dataset& dataset,
                                         const GroundTruthInfluences* ground_truth = nullptr) {
  ValidationReport report;
  std::set<std::string> artist_ids;
  for (const auto& a : dataset.artists()) {
    if (!is_valid_identifier(a.artist_id)) report.push_back({a.artist_id, "invalid artist identifier"});
    if (!artist_ids.insert(a.artist_id).second) report.push_back({a.artist_id, "duplicate artist_id"});
    if (a.period_start > a.period_end) report.push_back({a.artist_id, "period_start > period_end"});
  }

  std::set<std::string> painting_ids;
  const std::size_t dim = dataset.dimension();
  for (const auto& p : dataset.paintings()) {
    if (!is_valid_identifier(p.painting_id)) report.push_back({p.painting_id, "invalid painting identifier"});
    if (!painting_ids.insert(p.painting_id).second) report.push_back({p.painting_id, "duplicate painting_id"});
    if (!artist_ids.count(p.artist_id))
      report.push_back({p.painting_id, "unknown artist_id \"" + p.artist_id + "\""});
    if (p.features.size() != dim)
      report.push_back({p.painting_id, "feature dimension " + std::to_string(p.features.size()) +
                                           " differs from " + std::to_string(dim)});
    if (std::any_of(p.features.begin(), p.features.end(), [](double v) { return !std::isfinite(v); }))
      report.push_back({p.painting_id, "non-finite feature value"});
  }

  if (ground_truth) {
    for (const auto& pair : ground_truth->pairs) {
      const std::string id = pair.influenced + "->" + pair.influencer;
      if (pair.influenced == pair.influencer) report.push_back({id, "self influence"});
      if (!artist_ids.count(pair.influenced))
        report.push_back({id, "unknown artist_id \"" + pair.influenced + "\""});
      if (!artist_ids.count(pair.influencer))
        report.push_back({id, "unknown artist_id \"" + pair.influencer + "\""});
    }
  }
  return report;
}

}  // namespace artinfluence

#endif  // ARTINFLUENCE_CORE_MODEL_HPP

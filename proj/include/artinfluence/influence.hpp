#ifndef ARTINFLUENCE_INFLUENCE_HPP
#define ARTINFLUENCE_INFLUENCE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "artinfluence/core_model.hpp"
#include "artinfluence/error.hpp"
#include "artinfluence/painting_distance.hpp"

namespace artinfluence {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Percentiles used for the recall tables.
inline const std::vector<double>& report_percentiles() {
  static const std::vector<double> q{1, 10, 50, 90, 99};
  return q;
}

inline const std::vector<int>& report_top_k() {
  static const std::vector<int> k{5, 10, 15, 20, 25};
  return k;
}

/// Distance from one painting to the closest painting of a set.
inline double point_set_distance(std::size_t painting, std::span<const std::size_t> set,
                                 const PaintingDistanceMatrix& D) {
  if (set.empty()) throw EmptySet("point-set distance to an empty painting set");
  double best = kInfinity;
  for (std::size_t j : set) best = std::min(best, D(painting, j));
  return best;
}

/// Rank (1-based) of the nearest-rank q-percentile among n sorted values.
inline std::size_t percentile_rank(double q, std::size_t n) {
  const double r = std::ceil(q * static_cast<double>(n) / 100.0);
  return std::clamp<std::size_t>(r < 1.0 ? 1 : static_cast<std::size_t>(r), 1, n);
}

/// Directed artist distance from set `from` to set `to`: the nearest-rank
/// q-percentile of the point-set distances of `from`'s paintings. Small q
/// gives the minimum link, q = 50 the median, q = 100 the directed
/// Hausdorff distance.
inline double artist_distance_q(std::span<const std::size_t> from, std::span<const std::size_t> to, double q,
                                const PaintingDistanceMatrix& D) {
  if (from.empty() || to.empty()) throw EmptySet("artist distance needs two non-empty painting sets");
  if (!(q > 0.0 && q <= 100.0)) throw InvalidQ("q must lie in (0, 100], got " + std::to_string(q));
  std::vector<double> s;
  s.reserve(from.size());
  for (std::size_t p : from) s.push_back(point_set_distance(p, to, D));
  std::sort(s.begin(), s.end());
  return s[percentile_rank(q, s.size()) - 1];
}

/// Directed influenced-by graph. W(i, j) is finite only if artist i's period
/// ends no earlier than artist j's starts; then it is the q-percentile
/// distance from i's paintings to j's. The diagonal is +inf.
struct InfluenceGraph {
  std::vector<std::string> artist_ids;
  std::vector<std::string> styles;
  Eigen::MatrixXd weights;
  double q = 50.0;
  PaintingMetric metric = PaintingMetric::euclidean;

  std::size_t size() const noexcept { return artist_ids.size(); }
  double operator()(std::size_t i, std::size_t j) const {
    return weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
};

inline bool temporally_possible(const ArtistRecord& influenced, const ArtistRecord& influencer) {
  return influenced.period_end >= influencer.period_start;
}

inline InfluenceGraph build_influence_graph(const Dataset& dataset, double q, const PaintingDistanceMatrix& D) {
  if (!(q > 0.0 && q <= 100.0)) throw InvalidQ("q must lie in (0, 100], got " + std::to_string(q));
  const auto& artists = dataset.artists();
  for (const auto& a : artists)
    if (dataset.paintings_of(a.artist_id).empty())
      throw EmptySet("artist \"" + a.artist_id + "\" has no paintings");
  if (D.size() != dataset.painting_count()) throw DimensionMismatch("distance matrix does not match the dataset");

  InfluenceGraph g;
  g.q = q;
  g.metric = D.metric;
  const auto n = static_cast<Eigen::Index>(artists.size());
  g.weights = Eigen::MatrixXd::Constant(n, n, kInfinity);
  for (const auto& a : artists) {
    g.artist_ids.push_back(a.artist_id);
    g.styles.push_back(a.style);
  }
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) continue;
      const auto& ai = artists[static_cast<std::size_t>(i)];
      const auto& aj = artists[static_cast<std::size_t>(j)];
      if (!temporally_possible(ai, aj)) continue;
      g.weights(i, j) = artist_distance_q(dataset.paintings_of(ai.artist_id), dataset.paintings_of(aj.artist_id), q, D);
    }
  return g;
}

/// Symmetric Hausdorff distance max(h(i,j), h(j,i)) for every artist pair,
/// with h the directed (q = 100) distance. Diagnostic only; no mask.
inline Eigen::MatrixXd symmetric_hausdorff(const Dataset& dataset, const PaintingDistanceMatrix& D) {
  const auto& artists = dataset.artists();
  const auto n = static_cast<Eigen::Index>(artists.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j)
        h(i, j) = artist_distance_q(dataset.paintings_of(artists[static_cast<std::size_t>(i)].artist_id),
                                    dataset.paintings_of(artists[static_cast<std::size_t>(j)].artist_id), 100.0, D);
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = std::max(h(i, j), h(j, i));
  return out;
}

struct RankedInfluence {
  std::string artist_id;
  double weight = 0.0;

  bool operator==(const RankedInfluence&) const = default;
};

/// The k finite-weight candidates with the smallest weight, ascending; ties
/// by artist id.
inline std::vector<RankedInfluence> top_k_influences(const InfluenceGraph& g, std::size_t artist, std::size_t k) {
  if (k < 1) throw InvalidK("top-k needs k >= 1");
  std::vector<RankedInfluence> cand;
  for (std::size_t j = 0; j < g.size(); ++j) {
    const double w = g(artist, j);
    if (j != artist && std::isfinite(w)) cand.push_back({g.artist_ids[j], w});
  }
  auto less = [](const RankedInfluence& a, const RankedInfluence& b) {
    return a.weight < b.weight || (a.weight == b.weight && a.artist_id < b.artist_id);
  };
  const std::size_t m = std::min(k, cand.size());
  std::partial_sort(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(m), cand.end(), less);
  cand.resize(m);
  return cand;
}

struct RecallResult {
  double recall = 0.0;
  std::vector<InfluencePair> hits;
  /// Ground-truth pairs whose direction the temporal mask forbids; they are
  /// kept in the denominator but can never be hits.
  std::vector<InfluencePair> temporally_impossible;
};

inline RecallResult recall_at_k(const InfluenceGraph& g, const GroundTruthInfluences& gt, std::size_t k) {
  if (gt.pairs.empty()) throw EmptyGroundTruth("recall needs at least one ground-truth pair");
  auto index_of = [&](const std::string& id) {
    auto it = std::find(g.artist_ids.begin(), g.artist_ids.end(), id);
    if (it == g.artist_ids.end()) throw ReferentialError("ground-truth artist \"" + id + "\" is not in the graph");
    return static_cast<std::size_t>(it - g.artist_ids.begin());
  };
  RecallResult r;
  for (const auto& pair : gt.pairs) {
    const std::size_t i = index_of(pair.influenced);
    const std::size_t j = index_of(pair.influencer);
    if (!std::isfinite(g(i, j))) r.temporally_impossible.push_back(pair);
    const auto top = top_k_influences(g, i, k);
    if (std::any_of(top.begin(), top.end(), [&](const RankedInfluence& t) { return t.artist_id == pair.influencer; }))
      r.hits.push_back(pair);
  }
  r.recall = static_cast<double>(r.hits.size()) / static_cast<double>(gt.pairs.size());
  return r;
}

/// Recall (fraction) for every (q, k) combination: rows follow `qs`,
/// columns follow `ks`.
struct RecallTable {
  PaintingMetric metric = PaintingMetric::euclidean;
  std::vector<double> qs;
  std::vector<int> ks;
  Eigen::MatrixXd recall;
};

inline RecallTable recall_table(const Dataset& dataset, const PaintingDistanceMatrix& D,
                                const GroundTruthInfluences& gt, const std::vector<double>& qs = report_percentiles(),
                                const std::vector<int>& ks = report_top_k()) {
  RecallTable t;
  t.metric = D.metric;
  t.qs = qs;
  t.ks = ks;
  t.recall.resize(static_cast<Eigen::Index>(qs.size()), static_cast<Eigen::Index>(ks.size()));
  for (std::size_t r = 0; r < qs.size(); ++r) {
    const auto g = build_influence_graph(dataset, qs[r], D);
    for (std::size_t c = 0; c < ks.size(); ++c)
      t.recall(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          recall_at_k(g, gt, static_cast<std::size_t>(ks[c])).recall;
  }
  return t;
}

}  // namespace artinfluence

#endif  // ARTINFLUENCE_INFLUENCE_HPP

#ifndef ARTINFLUENCE_EMBEDDING_HPP
#define ARTINFLUENCE_EMBEDDING_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "artinfluence/error.hpp"
#include "artinfluence/influence.hpp"
#include "artinfluence/painting_distance.hpp"

namespace artinfluence {

inline constexpr double kUnreachableFactor = 1.5;

enum class Symmetrization { average, min, max };

inline std::string to_string(Symmetrization s) {
  switch (s) {
    case Symmetrization::average: return "average";
    case Symmetrization::min: return "min";
    case Symmetrization::max: return "max";
  }
  return "average";
}

inline Symmetrization parse_symmetrization(const std::string& s) {
  if (s == "average") return Symmetrization::average;
  if (s == "min") return Symmetrization::min;
  if (s == "max") return Symmetrization::max;
  throw ConfigError("symmetrization must be average, min or max, got '" + s + "'");
}

/// Artist coordinates: row per artist, columns in descending-eigenvalue order.
struct ArtistEmbedding {
  std::vector<std::string> artist_ids;
  std::vector<std::string> styles;
  Eigen::MatrixXd coordinates;
  /// Full spectrum of the double-centred matrix, non-increasing.
  std::vector<double> eigenvalues;
};

/// All-pairs shortest paths over the directed weighted graph; +inf weights
/// are absent edges. Unreachable pairs stay +inf, the diagonal is 0.
inline Eigen::MatrixXd graph_geodesics(const Eigen::MatrixXd& weights) {
  const auto n = static_cast<std::size_t>(weights.rows());
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double w = weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
      if (i != j && std::isfinite(w)) adj[i].emplace_back(j, w);
    }
  Eigen::MatrixXd out(weights.rows(), weights.cols());
  for (std::size_t i = 0; i < n; ++i) {
    const auto dist = dijkstra(adj, i);
    for (std::size_t j = 0; j < n; ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = dist[j];
  }
  return out;
}

inline Eigen::MatrixXd graph_geodesics(const InfluenceGraph& g) { return graph_geodesics(g.weights); }

enum class InfinityOrder { finitize_first, symmetrize_first };

inline InfinityOrder parse_infinity_order(const std::string& s) {
  if (s == "finitize-first") return InfinityOrder::finitize_first;
  if (s == "symmetrize-first") return InfinityOrder::symmetrize_first;
  throw ConfigError("infinity order must be finitize-first or symmetrize-first, got '" + s + "'");
}

inline std::string to_string(InfinityOrder o) {
  return o == InfinityOrder::finitize_first ? "finitize-first" : "symmetrize-first";
}

namespace detail {

inline Eigen::MatrixXd finitize(const Eigen::MatrixXd& m, double factor) {
  const Eigen::Index n = m.rows();
  double max_finite = -kInfinity;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (i != j && std::isfinite(m(i, j))) max_finite = std::max(max_finite, m(i, j));
  if (n > 1 && !std::isfinite(max_finite)) throw AllInfinite("no finite off-diagonal entry");
  Eigen::MatrixXd f = m;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      if (!std::isfinite(f(i, j))) f(i, j) = factor * max_finite;
  return f;
}

inline Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& f, Symmetrization mode) {
  const Eigen::Index n = f.rows();
  Eigen::MatrixXd s(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i == j) {
        s(i, j) = 0.0;
        continue;
      }
      const double a = f(i, j), b = f(j, i);
      switch (mode) {
        case Symmetrization::average: s(i, j) = (a + b) / 2.0; break;
        case Symmetrization::min: s(i, j) = std::min(a, b); break;
        case Symmetrization::max: s(i, j) = std::max(a, b); break;
      }
    }
  return s;
}

}  // namespace detail

/// Replaces +inf with factor * (largest finite off-diagonal entry), then
/// symmetrizes and zeroes the diagonal. With symmetrize_first the two steps
/// run in the other order.
inline Eigen::MatrixXd finitize_symmetrize(const Eigen::MatrixXd& m, double factor = kUnreachableFactor,
                                           Symmetrization mode = Symmetrization::average,
                                           InfinityOrder order = InfinityOrder::finitize_first) {
  if (m.rows() != m.cols()) throw InvalidInput("matrix must be square");
  if (order == InfinityOrder::finitize_first) return detail::symmetrize(detail::finitize(m, factor), mode);
  return detail::finitize(detail::symmetrize(m, mode), factor);
}

/// Classical (Torgerson) MDS. Dimensions whose eigenvalue is not positive
/// are zero. Each column's largest-magnitude entry is made positive.
inline ArtistEmbedding classical_mds(const Eigen::MatrixXd& S, int d) {
  if (S.rows() != S.cols()) throw InvalidInput("distance matrix must be square");
  if (d < 1) throw InvalidInput("embedding dimension must be at least 1");
  const Eigen::Index n = S.rows();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) {
      if (!std::isfinite(S(i, j)) || S(i, j) < 0.0) throw InvalidInput("distances must be finite and non-negative");
      if (std::abs(S(i, j) - S(j, i)) > 1e-9) throw InvalidInput("distance matrix is not symmetric");
    }

  ArtistEmbedding e;
  e.coordinates = Eigen::MatrixXd::Zero(n, d);
  if (n == 0) return e;
  const Eigen::MatrixXd sq = S.array().square().matrix();
  const Eigen::MatrixXd J = Eigen::MatrixXd::Identity(n, n) - Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::MatrixXd B = -0.5 * J * sq * J;
  B = 0.5 * (B + B.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(B);
  if (solver.info() != Eigen::Success) throw InvalidInput("eigendecomposition failed");
  const Eigen::VectorXd& vals = solver.eigenvalues();  // ascending
  const Eigen::MatrixXd& vecs = solver.eigenvectors();
  for (Eigen::Index r = n - 1; r >= 0; --r) e.eigenvalues.push_back(vals(r));

  for (Eigen::Index c = 0; c < std::min<Eigen::Index>(d, n); ++c) {
    const Eigen::Index src = n - 1 - c;
    const double lambda = vals(src);
    if (!(lambda > 0.0)) continue;
    Eigen::VectorXd col = vecs.col(src) * std::sqrt(lambda);
    Eigen::Index arg = 0;
    for (Eigen::Index r = 1; r < n; ++r)
      if (std::abs(col(r)) > std::abs(col(arg))) arg = r;
    if (col(arg) < 0.0) col = -col;
    e.coordinates.col(c) = col;
  }
  return e;
}

struct MapOfArtists {
  ArtistEmbedding embedding;
  Eigen::MatrixXd geodesics;
  Eigen::MatrixXd symmetric_distances;
  Symmetrization symmetrization = Symmetrization::average;
  InfinityOrder order = InfinityOrder::finitize_first;
  double unreachable_factor = kUnreachableFactor;
};

inline MapOfArtists map_of_artists(const InfluenceGraph& g, int d = 3, double unreachable_factor = kUnreachableFactor,
                                   Symmetrization mode = Symmetrization::average,
                                   InfinityOrder order = InfinityOrder::finitize_first) {
  if (g.size() < 2) throw InvalidInput("a map needs at least two artists");
  MapOfArtists m;
  m.geodesics = graph_geodesics(g);
  m.symmetric_distances = finitize_symmetrize(m.geodesics, unreachable_factor, mode, order);
  m.embedding = classical_mds(m.symmetric_distances, d);
  m.embedding.artist_ids = g.artist_ids;
  m.embedding.styles = g.styles;
  m.symmetrization = mode;
  m.order = order;
  m.unreachable_factor = unreachable_factor;
  return m;
}

}  // namespace artinfluence

#endif  // ARTINFLUENCE_EMBEDDING_HPP

#ifndef ARTINFLUENCE_PAINTING_DISTANCE_HPP
#define ARTINFLUENCE_PAINTING_DISTANCE_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "artinfluence/core_model.hpp"
#include "artinfluence/error.hpp"

namespace artinfluence {

enum class PaintingMetric { euclidean, manifold };

inline std::string to_string(PaintingMetric m) { return m == PaintingMetric::euclidean ? "euclidean" : "manifold"; }

inline PaintingMetric parse_metric(const std::string& s) {
  if (s == "euclidean") return PaintingMetric::euclidean;
  if (s == "manifold") return PaintingMetric::manifold;
  throw ConfigError("metric must be 'euclidean' or 'manifold', got '" + s + "'");
}

/// N x N painting dissimilarities in dataset painting order.
struct PaintingDistanceMatrix {
  PaintingMetric metric = PaintingMetric::euclidean;
  std::vector<std::string> ids;
  Eigen::MatrixXd values;

  std::size_t size() const noexcept { return static_cast<std::size_t>(values.rows()); }
  double operator()(std::size_t i, std::size_t j) const {
    return values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
};

inline Eigen::MatrixXd euclidean_distances(std::span<const FeatureVector> points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const auto& a = points[static_cast<std::size_t>(i)];
      const auto& b = points[static_cast<std::size_t>(j)];
      double s = 0.0;
      for (std::size_t k = 0; k < a.size(); ++k) {
        const double t = a[k] - b[k];
        s += t * t;
      }
      d(i, j) = d(j, i) = std::sqrt(s);
    }
  return d;
}

inline PaintingDistanceMatrix euclidean_all_pairs(const Dataset& dataset) {
  std::vector<FeatureVector> pts;
  PaintingDistanceMatrix m;
  for (const auto& p : dataset.paintings()) {
    pts.push_back(p.features);
    m.ids.push_back(p.painting_id);
  }
  m.metric = PaintingMetric::euclidean;
  m.values = euclidean_distances(pts);
  return m;
}

struct GraphEdge {
  std::size_t a = 0;
  std::size_t b = 0;
  double weight = 0.0;
};

/// Undirected weighted graph over paintings.
struct NeighborGraph {
  std::size_t nodes = 0;
  int k = 0;
  std::string rule = "symmetric-knn+mst-bridges";
  /// Sorted by (a, b) with a < b.
  std::vector<GraphEdge> edges;
  std::size_t bridge_edges = 0;

  std::vector<std::vector<std::pair<std::size_t, double>>> adjacency() const {
    std::vector<std::vector<std::pair<std::size_t, double>>> adj(nodes);
    for (const auto& e : edges) {
      adj[e.a].emplace_back(e.b, e.weight);
      adj[e.b].emplace_back(e.a, e.weight);
    }
    return adj;
  }
};

namespace detail {

struct DisjointSets {
  std::vector<std::size_t> parent;
  explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  bool unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[std::max(a, b)] = std::min(a, b);
    return true;
  }
};

}  // namespace detail

/// Symmetric kNN graph: (i, j) is an edge if either is among the other's k
/// nearest (distance ties to the lower index). Disconnected components are
/// joined by the minimum-spanning-tree edges between them.
inline NeighborGraph build_knn_graph(const Eigen::MatrixXd& euclid, int k) {
  const auto n = static_cast<std::size_t>(euclid.rows());
  if (n < 2) throw InvalidK("need at least 2 paintings");
  if (k < 1 || static_cast<std::size_t>(k) >= n)
    throw InvalidK("k must satisfy 1 <= k < N (k=" + std::to_string(k) + ", N=" + std::to_string(n) + ")");
  auto D = [&](std::size_t i, std::size_t j) {
    return euclid(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };

  std::set<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    order.clear();
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) order.push_back(j);
    std::partial_sort(order.begin(), order.begin() + k, order.end(), [&](std::size_t a, std::size_t b) {
      const double da = D(i, a), db = D(i, b);
      return da < db || (da == db && a < b);
    });
    for (int t = 0; t < k; ++t) pairs.emplace(std::min(i, order[t]), std::max(i, order[t]));
  }

  NeighborGraph g;
  g.nodes = n;
  g.k = k;
  detail::DisjointSets ds(n);
  std::size_t components = n;
  for (const auto& [a, b] : pairs) {
    g.edges.push_back({a, b, D(a, b)});
    if (ds.unite(a, b)) --components;
  }

  if (components > 1) {
    std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        if (ds.find(a) != ds.find(b)) candidates.emplace_back(D(a, b), a, b);
    std::sort(candidates.begin(), candidates.end());
    for (const auto& [w, a, b] : candidates) {
      if (!ds.unite(a, b)) continue;
      g.edges.push_back({a, b, w});
      ++g.bridge_edges;
      if (--components == 1) break;
    }
    std::sort(g.edges.begin(), g.edges.end(),
              [](const GraphEdge& x, const GraphEdge& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
  }
  return g;
}

inline NeighborGraph build_knn_graph(const PaintingDistanceMatrix& euclid, int k) {
  return build_knn_graph(euclid.values, k);
}

/// Single-source shortest paths with non-negative weights.
inline std::vector<double> dijkstra(const std::vector<std::vector<std::pair<std::size_t, double>>>& adj,
                                    std::size_t source) {
  std::vector<double> dist(adj.size(), std::numeric_limits<double>::infinity());
  using Item = std::pair<double, std::size_t>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  dist[source] = 0.0;
  heap.emplace(0.0, source);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (d > dist[u]) continue;
    for (const auto& [v, w] : adj[u]) {
      const double nd = d + w;
      if (nd < dist[v]) {
        dist[v] = nd;
        heap.emplace(nd, v);
      }
    }
  }
  return dist;
}

/// Geodesic distances along the graph. Entry (i, j) for i < j comes from
/// source i and is mirrored, so the matrix is exactly symmetric.
inline Eigen::MatrixXd geodesic_distances(const NeighborGraph& graph) {
  const auto adj = graph.adjacency();
  const auto n = static_cast<Eigen::Index>(graph.nodes);
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto dist = dijkstra(adj, static_cast<std::size_t>(i));
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = dist[static_cast<std::size_t>(j)];
      if (!std::isfinite(d)) throw DisconnectedGraph("no path between nodes " + std::to_string(i) + " and " + std::to_string(j));
      m(i, j) = m(j, i) = d;
    }
  }
  return m;
}

inline PaintingDistanceMatrix geodesic_all_pairs(const NeighborGraph& graph, std::vector<std::string> ids = {}) {
  PaintingDistanceMatrix m;
  m.metric = PaintingMetric::manifold;
  m.values = geodesic_distances(graph);
  m.ids = std::move(ids);
  return m;
}

/// The painting matrix for the requested metric.
inline PaintingDistanceMatrix painting_distances(const Dataset& dataset, PaintingMetric metric, int k_nn = 10) {
  auto euclid = euclidean_all_pairs(dataset);
  if (metric == PaintingMetric::euclidean) return euclid;
  return geodesic_all_pairs(build_knn_graph(euclid, k_nn), euclid.ids);
}

}  // namespace artinfluence

#endif  // ARTINFLUENCE_PAINTING_DISTANCE_HPP

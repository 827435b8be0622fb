#ifndef ARTINFLUENCE_BOW_HPP
#define ARTINFLUENCE_BOW_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "artinfluence/core_model.hpp"
#include "artinfluence/error.hpp"
#include "artinfluence/random.hpp"

namespace artinfluence::bow {

inline constexpr std::size_t kDefaultCodebookSize = 600;

struct Codebook {
  std::vector<FeatureVector> centroids;
  std::uint64_t seed = 0;

  std::size_t size() const noexcept { return centroids.size(); }
  std::size_t width() const noexcept { return centroids.empty() ? 0 : centroids.front().size(); }
  bool operator==(const Codebook&) const = default;
};

struct KMeansOptions {
  std::size_t k = kDefaultCodebookSize;
  std::uint64_t seed = 0;
  int max_iter = 100;
  double tol = 1e-6;
};

struct KMeansResult {
  Codebook codebook;
  /// Inertia after every assignment step, in order.
  std::vector<double> inertia_history;
  int iterations = 0;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

/// Index of the nearest centroid; ties go to the lowest index.
inline std::size_t nearest_centroid(std::span<const double> x, const std::vector<FeatureVector>& centroids,
                                    double* dist2 = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = squared_distance(x, centroids[c]);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (dist2) *dist2 = best_d;
  return best;
}

namespace detail {

inline std::vector<FeatureVector> kmeanspp_seed(std::span<const FeatureVector> points, std::size_t k, Rng& rng) {
  std::vector<FeatureVector> centers;
  centers.reserve(k);
  centers.push_back(points[rng.index(points.size())]);

  std::vector<double> d2(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) d2[i] = squared_distance(points[i], centers[0]);

  while (centers.size() < k) {
    double total = 0.0;
    for (double v : d2) total += v;
    if (!(total > 0.0)) throw InsufficientData("fewer than " + std::to_string(k) + " distinct descriptors");
    const double target = rng.uniform() * total;
    double acc = 0.0;
    std::size_t pick = points.size();
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (d2[i] <= 0.0) continue;
      acc += d2[i];
      pick = i;
      if (acc > target) break;
    }
    centers.push_back(points[pick]);
    for (std::size_t i = 0; i < points.size(); ++i)
      d2[i] = std::min(d2[i], squared_distance(points[i], centers.back()));
  }
  return centers;
}

}  // namespace detail

/// Lloyd iteration with k-means++ seeding. Empty clusters are re-seeded with
/// the point farthest from its assigned centroid.
inline KMeansResult kmeans_fit(std::span<const FeatureVector> points, const KMeansOptions& opt) {
  if (opt.k < 1) throw InsufficientData("k must be at least 1");
  if (points.size() < opt.k)
    throw InsufficientData("have " + std::to_string(points.size()) + " descriptors, need at least " +
                           std::to_string(opt.k));
  const std::size_t width = points.front().size();
  for (const auto& p : points)
    if (p.size() != width) throw DimensionMismatch("descriptor widths differ");

  Rng rng(opt.seed);
  KMeansResult result;
  auto centers = detail::kmeanspp_seed(points, opt.k, rng);
  std::vector<std::size_t> assign(points.size());
  std::vector<double> dist(points.size());

  for (int iter = 0; iter < std::max(1, opt.max_iter); ++iter) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      assign[i] = nearest_centroid(points[i], centers, &dist[i]);
      inertia += dist[i];
    }
    result.inertia_history.push_back(inertia);
    result.iterations = iter + 1;

    // Update step: per-cluster sums in point order.
    std::vector<FeatureVector> sums(opt.k, FeatureVector(width, 0.0));
    std::vector<std::size_t> counts(opt.k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      auto& s = sums[assign[i]];
      for (std::size_t d = 0; d < width; ++d) s[d] += points[i][d];
      ++counts[assign[i]];
    }
    for (std::size_t c = 0; c < opt.k; ++c) {
      if (counts[c] == 0) continue;
      for (std::size_t d = 0; d < width; ++d) centers[c][d] = sums[c][d] / static_cast<double>(counts[c]);
    }
    for (std::size_t c = 0; c < opt.k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = 0;
      double far_d = -1.0;
      for (std::size_t i = 0; i < points.size(); ++i) {
        if (counts[assign[i]] <= 1) continue;
        const double d = squared_distance(points[i], centers[assign[i]]);
        if (d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far_d < 0.0) break;
      --counts[assign[far]];
      assign[far] = c;
      counts[c] = 1;
      centers[c] = points[far];
    }

    if (inertia == 0.0) break;
    if (result.inertia_history.size() >= 2) {
      const double prev = result.inertia_history[result.inertia_history.size() - 2];
      if ((prev - inertia) / prev < opt.tol) break;
    }
  }

  result.codebook.centroids = std::move(centers);
  result.codebook.seed = opt.seed;
  return result;
}

inline Codebook kmeans_codebook(std::span<const FeatureVector> points, const KMeansOptions& opt) {
  return kmeans_fit(points, opt).codebook;
}

struct BowHistogram {
  std::vector<std::size_t> counts;
  /// counts / total; all zero when the painting has no descriptors.
  std::vector<double> normalized;
  bool empty = true;

  std::size_t total() const {
    std::size_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
};

inline BowHistogram quantize(std::span<const FeatureVector> descriptors, const Codebook& codebook) {
  BowHistogram h;
  h.counts.assign(codebook.size(), 0);
  h.normalized.assign(codebook.size(), 0.0);
  for (const auto& d : descriptors) {
    if (d.size() != codebook.width())
      throw DimensionMismatch("descriptor width " + std::to_string(d.size()) + " vs codebook width " +
                              std::to_string(codebook.width()));
    ++h.counts[nearest_centroid(d, codebook.centroids)];
  }
  h.empty = descriptors.empty();
  if (!h.empty) {
    const double n = static_cast<double>(descriptors.size());
    for (std::size_t c = 0; c < h.counts.size(); ++c) h.normalized[c] = static_cast<double>(h.counts[c]) / n;
  }
  return h;
}

}  // namespace artinfluence::bow

#endif  // ARTINFLUENCE_BOW_HPP

#ifndef ARTINFLUENCE_SVM_HPP
#define ARTINFLUENCE_SVM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "artinfluence/core_model.hpp"
#include "artinfluence/error.hpp"
#include "artinfluence/folds.hpp"

namespace artinfluence::svm {

/// Per-dimension min-max scaling fit on training data. Constant dimensions
/// map to 0. An empty scaler is the identity.
struct MinMaxScaler {
  std::vector<double> min;
  std::vector<double> max;

  bool empty() const noexcept { return min.empty(); }

  static MinMaxScaler fit(std::span<const FeatureVector> train) {
    MinMaxScaler s;
    if (train.empty()) return s;
    s.min = train.front();
    s.max = train.front();
    for (const auto& x : train)
      for (std::size_t d = 0; d < x.size(); ++d) {
        s.min[d] = std::min(s.min[d], x[d]);
        s.max[d] = std::max(s.max[d], x[d]);
      }
    return s;
  }

  FeatureVector apply(std::span<const double> x) const {
    if (empty()) return {x.begin(), x.end()};
    if (x.size() != min.size())
      throw DimensionMismatch("expected " + std::to_string(min.size()) + " features, got " +
                              std::to_string(x.size()));
    FeatureVector out(x.size());
    for (std::size_t d = 0; d < x.size(); ++d) {
      const double range = max[d] - min[d];
      out[d] = range > 0.0 ? (x[d] - min[d]) / range : 0.0;
    }
    return out;
  }

  std::vector<FeatureVector> apply(std::span<const FeatureVector> xs) const {
    std::vector<FeatureVector> out;
    out.reserve(xs.size());
    for (const auto& x : xs) out.push_back(apply(x));
    return out;
  }

  bool operator==(const MinMaxScaler&) const = default;
};

struct ScaledSplit {
  std::vector<FeatureVector> train;
  std::vector<FeatureVector> test;
  MinMaxScaler scaler;
};

inline ScaledSplit scale_fit_apply(std::span<const FeatureVector> train, std::span<const FeatureVector> test) {
  ScaledSplit out;
  out.scaler = MinMaxScaler::fit(train);
  out.train = out.scaler.apply(train);
  out.test = out.scaler.apply(test);
  return out;
}

inline double rbf_kernel(std::span<const double> a, std::span<const double> b, double gamma) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return std::exp(-gamma * s);
}

inline Eigen::MatrixXd kernel_matrix(std::span<const FeatureVector> xs, double gamma) {
  const Eigen::Index n = static_cast<Eigen::Index>(xs.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < n; ++j) k(i, j) = k(j, i) = rbf_kernel(xs[i], xs[j], gamma);
  }
  return k;
}

struct SmoOptions {
  double C = 1.0;
  double tol = 1e-3;
  long max_passes = 1'000'000;
  /// Record the dual objective after every accepted pair update.
  bool trace = false;
};

/// Solution of one binary C-SVM dual:
///   max  sum(a) - 1/2 sum_ij a_i a_j y_i y_j K_ij
///   s.t. 0 <= a_i <= C, sum(a_i y_i) = 0
struct BinarySolution {
  std::vector<double> alpha;
  double bias = 0.0;
  double max_kkt_violation = 0.0;
  long iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;
};

inline double dual_objective(const Eigen::MatrixXd& K, std::span<const int> y, std::span<const double> alpha) {
  double lin = 0.0, quad = 0.0;
  const std::size_t n = y.size();
  for (std::size_t i = 0; i < n; ++i) {
    lin += alpha[i];
    if (alpha[i] == 0.0) continue;
    for (std::size_t j = 0; j < n; ++j)
      quad += alpha[i] * alpha[j] * y[i] * y[j] * K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  return lin - 0.5 * quad;
}

/// Sequential minimal optimization with maximal-violating-pair working set
/// selection, on a precomputed kernel matrix. Labels are +1 / -1.
inline BinarySolution smo_solve(const Eigen::MatrixXd& K, std::span<const int> y, const SmoOptions& opt) {
  const std::size_t n = y.size();
  BinarySolution sol;
  sol.alpha.assign(n, 0.0);
  // Gradient of the minimization form f(a) = 1/2 a'Qa - e'a.
  std::vector<double> grad(n, -1.0);
  auto Q = [&](std::size_t i, std::size_t j) {
    return y[i] * y[j] * K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  };
  auto in_up = [&](std::size_t t) {
    return (y[t] == 1 && sol.alpha[t] < opt.C) || (y[t] == -1 && sol.alpha[t] > 0.0);
  };
  auto in_low = [&](std::size_t t) {
    return (y[t] == 1 && sol.alpha[t] > 0.0) || (y[t] == -1 && sol.alpha[t] < opt.C);
  };
  double objective = 0.0;
  if (opt.trace) sol.objective_trace.push_back(objective);

  for (;;) {
    double m_up = -std::numeric_limits<double>::infinity();
    double m_low = std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * grad[t];
      if (in_up(t) && v > m_up) {
        m_up = v;
        i = t;
      }
      if (in_low(t) && v < m_low) {
        m_low = v;
        j = t;
      }
    }
    sol.max_kkt_violation = (i == n || j == n) ? 0.0 : std::max(0.0, m_up - m_low);
    if (sol.max_kkt_violation <= opt.tol) {
      sol.converged = true;
      break;
    }
    if (sol.iterations >= opt.max_passes) break;
    ++sol.iterations;

    const double old_ai = sol.alpha[i], old_aj = sol.alpha[j];
    double quad = K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) +
                  K(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)) -
                  2.0 * K(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    if (quad <= 0.0) quad = 1e-12;
    double ai = old_ai, aj = old_aj;
    if (y[i] != y[j]) {
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = old_ai - old_aj;
      ai += delta;
      aj += delta;
      if (diff > 0) {
        if (aj < 0) {
          aj = 0;
          ai = diff;
        }
      } else if (ai < 0) {
        ai = 0;
        aj = -diff;
      }
      if (diff > 0) {
        if (ai > opt.C) {
          ai = opt.C;
          aj = opt.C - diff;
        }
      } else if (aj > opt.C) {
        aj = opt.C;
        ai = opt.C + diff;
      }
    } else {
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = old_ai + old_aj;
      ai -= delta;
      aj += delta;
      if (sum > opt.C) {
        if (ai > opt.C) {
          ai = opt.C;
          aj = sum - opt.C;
        }
      } else if (aj < 0) {
        aj = 0;
        ai = sum;
      }
      if (sum > opt.C) {
        if (aj > opt.C) {
          aj = opt.C;
          ai = sum - opt.C;
        }
      } else if (ai < 0) {
        ai = 0;
        aj = sum;
      }
    }
    sol.alpha[i] = ai;
    sol.alpha[j] = aj;
    const double dai = ai - old_ai, daj = aj - old_aj;
    // Exact change of the maximization-form objective for this pair move.
    if (opt.trace) {
      const double d_min = grad[i] * dai + grad[j] * daj +
                           0.5 * (Q(i, i) * dai * dai + Q(j, j) * daj * daj + 2.0 * Q(i, j) * dai * daj);
      objective -= d_min;
      sol.objective_trace.push_back(objective);
    }
    for (std::size_t t = 0; t < n; ++t) grad[t] += Q(t, i) * dai + Q(t, j) * daj;
  }

  // Bias from free support vectors, else the midpoint of the feasible range.
  double sum_free = 0.0;
  std::size_t n_free = 0;
  double ub = std::numeric_limits<double>::infinity(), lb = -std::numeric_limits<double>::infinity();
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = y[t] * grad[t];
    if (sol.alpha[t] > 0.0 && sol.alpha[t] < opt.C) {
      sum_free += yg;
      ++n_free;
    } else if ((sol.alpha[t] >= opt.C && y[t] == -1) || (sol.alpha[t] <= 0.0 && y[t] == 1)) {
      ub = std::min(ub, yg);
    } else {
      lb = std::max(lb, yg);
    }
  }
  double rho;
  if (n_free > 0)
    rho = sum_free / static_cast<double>(n_free);
  else if (std::isfinite(ub) && std::isfinite(lb))
    rho = 0.5 * (ub + lb);
  else
    rho = std::isfinite(ub) ? ub : (std::isfinite(lb) ? lb : 0.0);
  sol.bias = -rho;
  return sol;
}

/// One-vs-rest binary model over its own support vectors.
struct BinaryModel {
  std::vector<FeatureVector> support_vectors;
  /// alpha_i * y_i for each support vector.
  std::vector<double> coefficients;
  double bias = 0.0;

  double decision(std::span<const double> x, double gamma) const {
    double s = bias;
    for (std::size_t i = 0; i < support_vectors.size(); ++i)
      s += coefficients[i] * rbf_kernel(support_vectors[i], x, gamma);
    return s;
  }

  bool operator==(const BinaryModel&) const = default;
};

struct KernelClassifierModel {
  double C = 1.0;
  double gamma = 1.0;
  std::size_t dimension = 0;
  MinMaxScaler scaler;
  std::vector<BinaryModel> classes;

  bool operator==(const KernelClassifierModel&) const = default;
};

struct TrainOptions {
  double C = 1.0;
  double gamma = 1.0;
  double tol = 1e-3;
  long max_passes = 1'000'000;
};

/// Labels are class indices in [0, n_classes). Each class is trained one
/// against the rest. Features are used as given; see fit_scaled_classifier
/// for the scaled pipeline.
inline KernelClassifierModel train_kernel_classifier(std::span<const FeatureVector> features,
                                                     std::span<const int> labels, std::size_t n_classes,
                                                     const TrainOptions& opt,
                                                     std::vector<BinarySolution>* solutions = nullptr) {
  if (features.size() != labels.size()) throw InvalidInput("features and labels differ in length");
  if (n_classes < 2) throw DegenerateLabels("at least two classes are required");
  std::vector<std::size_t> per_class(n_classes, 0);
  for (int l : labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= n_classes) throw InvalidInput("label out of range");
    ++per_class[static_cast<std::size_t>(l)];
  }
  if (std::count_if(per_class.begin(), per_class.end(), [](std::size_t c) { return c > 0; }) < 2)
    throw DegenerateLabels("training data contains a single class");
  const std::size_t dim = features.front().size();
  for (const auto& x : features)
    if (x.size() != dim) throw DimensionMismatch("feature vectors differ in length");

  KernelClassifierModel model;
  model.C = opt.C;
  model.gamma = opt.gamma;
  model.dimension = dim;
  const Eigen::MatrixXd K = kernel_matrix(features, opt.gamma);
  SmoOptions smo{opt.C, opt.tol, opt.max_passes, solutions != nullptr};
  for (std::size_t c = 0; c < n_classes; ++c) {
    std::vector<int> y(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) y[i] = labels[i] == static_cast<int>(c) ? 1 : -1;
    BinaryModel bm;
    if (per_class[c] == 0) {
      // Class absent from this split: it can never win the argmax.
      bm.bias = -std::numeric_limits<double>::max();
    } else {
      BinarySolution sol = smo_solve(K, y, smo);
      for (std::size_t i = 0; i < y.size(); ++i) {
        if (sol.alpha[i] <= 0.0) continue;
        bm.support_vectors.push_back(features[i]);
        bm.coefficients.push_back(sol.alpha[i] * y[i]);
      }
      bm.bias = sol.bias;
      if (solutions) solutions->push_back(std::move(sol));
    }
    model.classes.push_back(std::move(bm));
  }
  return model;
}

struct Prediction {
  int label = 0;
  std::vector<double> decision_values;
};

/// argmax of the per-class decision values; ties go to the lowest class.
inline Prediction predict(const KernelClassifierModel& model, std::span<const double> x) {
  if (x.size() != model.dimension)
    throw DimensionMismatch("expected " + std::to_string(model.dimension) + " features, got " +
                            std::to_string(x.size()));
  const FeatureVector scaled = model.scaler.apply(x);
  Prediction p;
  for (const auto& bm : model.classes) p.decision_values.push_back(bm.decision(scaled, model.gamma));
  p.label = static_cast<int>(std::max_element(p.decision_values.begin(), p.decision_values.end()) -
                             p.decision_values.begin());
  return p;
}

/// Powers of two from 2^lo to 2^hi in steps of 2^step.
inline std::vector<double> power_grid(int lo, int hi, int step) {
  std::vector<double> g;
  for (int e = lo; e <= hi; e += step) g.push_back(std::ldexp(1.0, e));
  return g;
}

inline std::vector<double> default_c_grid() { return power_grid(-5, 15, 2); }
inline std::vector<double> default_gamma_grid() { return power_grid(-15, 3, 2); }

struct GridPoint {
  double C = 0.0;
  double gamma = 0.0;
  double accuracy = 0.0;
};

struct GridSearchResult {
  double best_C = 0.0;
  double best_gamma = 0.0;
  double best_accuracy = -1.0;
  std::vector<GridPoint> surface;
};

inline double cv_accuracy(std::span<const FeatureVector> features, std::span<const int> labels,
                          std::size_t n_classes, std::span<const int> fold_of, int folds, const TrainOptions& opt) {
  double acc_sum = 0.0;
  int used = 0;
  for (int f = 0; f < folds; ++f) {
    std::vector<FeatureVector> tx, vx;
    std::vector<int> ty, vy;
    for (std::size_t i = 0; i < features.size(); ++i) {
      if (fold_of[i] == f) {
        vx.push_back(features[i]);
        vy.push_back(labels[i]);
      } else {
        tx.push_back(features[i]);
        ty.push_back(labels[i]);
      }
    }
    if (vx.empty()) continue;
    const auto model = train_kernel_classifier(tx, ty, n_classes, opt);
    std::size_t correct = 0;
    for (std::size_t i = 0; i < vx.size(); ++i) correct += predict(model, vx[i]).label == vy[i];
    acc_sum += static_cast<double>(correct) / static_cast<double>(vx.size());
    ++used;
  }
  return used ? acc_sum / used : 0.0;
}

/// Exhaustive grid search by mean stratified-CV accuracy. Ties prefer the
/// smaller C, then the smaller gamma.
inline GridSearchResult grid_search(std::span<const FeatureVector> features, std::span<const int> labels,
                                    std::size_t n_classes, int folds, std::span<const double> c_grid,
                                    std::span<const double> gamma_grid, std::uint64_t seed = 0,
                                    double tol = 1e-3, long max_passes = 1'000'000) {
  if (folds < 2) throw InvalidInput("grid search needs at least 2 folds");
  if (c_grid.empty() || gamma_grid.empty()) throw InvalidInput("empty parameter grid");
  const auto fold_of = stratified_folds(labels, folds, seed);
  std::vector<double> cs(c_grid.begin(), c_grid.end()), gs(gamma_grid.begin(), gamma_grid.end());
  std::sort(cs.begin(), cs.end());
  std::sort(gs.begin(), gs.end());
  GridSearchResult r;
  for (double C : cs)
    for (double g : gs) {
      const double acc = cv_accuracy(features, labels, n_classes, fold_of, folds, {C, g, tol, max_passes});
      r.surface.push_back({C, g, acc});
      if (acc > r.best_accuracy) {
        r.best_accuracy = acc;
        r.best_C = C;
        r.best_gamma = g;
      }
    }
  return r;
}

struct ScaledFitOptions {
  std::vector<double> c_grid = default_c_grid();
  std::vector<double> gamma_grid = default_gamma_grid();
  int inner_folds = 5;
  std::uint64_t seed = 0;
  double tol = 1e-3;
  long max_passes = 1'000'000;
};

/// Scaling fit on the training data, grid search on the scaled data, then a
/// final model on the whole training set with the scaler embedded.
inline KernelClassifierModel fit_scaled_classifier(std::span<const FeatureVector> features,
                                                   std::span<const int> labels, std::size_t n_classes,
                                                   const ScaledFitOptions& opt,
                                                   GridSearchResult* search = nullptr) {
  const MinMaxScaler scaler = MinMaxScaler::fit(features);
  const auto scaled = scaler.apply(features);
  GridSearchResult gs;
  if (opt.c_grid.size() == 1 && opt.gamma_grid.size() == 1) {
    gs.best_C = opt.c_grid.front();
    gs.best_gamma = opt.gamma_grid.front();
  } else {
    gs = grid_search(scaled, labels, n_classes, opt.inner_folds, opt.c_grid, opt.gamma_grid, opt.seed, opt.tol,
                     opt.max_passes);
  }
  auto model = train_kernel_classifier(scaled, labels, n_classes, {gs.best_C, gs.best_gamma, opt.tol, opt.max_passes});
  model.scaler = scaler;
  if (search) *search = std::move(gs);
  return model;
}

}  // namespace artinfluence::svm

#endif  // ARTINFLUENCE_SVM_HPP

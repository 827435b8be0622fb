#include <algorithm>
#include <random>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "artinfluence/svm.hpp"
#include "oracles.hpp"

using namespace artinfluence;

namespace {

struct Problem {
  std::vector<FeatureVector> x;
  std::vector<int> y;
};

Problem random_problem(std::mt19937_64& rng, std::size_t n, std::size_t dim) {
  Problem p;
  p.x = oracle::random_points(rng, n, dim);
  for (std::size_t i = 0; i < n; ++i) p.y.push_back(i % 2 ? 1 : -1);
  std::shuffle(p.y.begin(), p.y.end(), rng);
  return p;
}

// Largest violation of the KKT conditions recomputed from alpha alone.
double kkt_violation(const Eigen::MatrixXd& K, const std::vector<int>& y, const std::vector<double>& a, double C) {
  const std::size_t n = y.size();
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += y[i] * y[j] * K(i, j) * a[j];
    g[i] = s - 1.0;
  }
  double up = -1e300, low = 1e300;
  for (std::size_t t = 0; t < n; ++t) {
    const double v = -y[t] * g[t];
    if ((y[t] == 1 && a[t] < C) || (y[t] == -1 && a[t] > 0)) up = std::max(up, v);
    if ((y[t] == 1 && a[t] > 0) || (y[t] == -1 && a[t] < C)) low = std::min(low, v);
  }
  return std::max(0.0, up - low);
}

}  // namespace

TEST(Smo, MatchesBruteForceQpOnTinyProblems) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = 2 + static_cast<std::size_t>(trial % 5);
    auto p = random_problem(rng, n, 2);
    const double C = std::ldexp(1.0, static_cast<int>(trial % 7) - 3);
    const double gamma = std::ldexp(1.0, static_cast<int>(trial % 5) - 2);
    const auto K = svm::kernel_matrix(p.x, gamma);
    const auto exact = oracle::brute_force_svm_dual(K, p.y, C);
    ASSERT_FALSE(exact.alpha.empty());
    const auto sol = svm::smo_solve(K, p.y, {C, 1e-12, 1'000'000, false});
    ASSERT_TRUE(sol.converged);
    EXPECT_NEAR(svm::dual_objective(K, p.y, sol.alpha), exact.objective, 1e-9);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(sol.alpha[i], exact.alpha[i], 1e-6) << "trial " << trial;
  }
}

TEST(Smo, ObjectiveNeverDecreasesAndTraceIsExact) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = random_problem(rng, 40, 3);
    const auto K = svm::kernel_matrix(p.x, 2.0);
    const auto sol = svm::smo_solve(K, p.y, {4.0, 1e-6, 1'000'000, true});
    ASSERT_EQ(sol.objective_trace.size(), static_cast<std::size_t>(sol.iterations) + 1);
    for (std::size_t i = 1; i < sol.objective_trace.size(); ++i)
      EXPECT_GE(sol.objective_trace[i], sol.objective_trace[i - 1]) << "update " << i;
    EXPECT_NEAR(sol.objective_trace.back(), svm::dual_objective(K, p.y, sol.alpha), 1e-8);
  }
}

TEST(Smo, KktHoldsAtTermination) {
  std::mt19937_64 rng(8);
  for (double tol : {1e-2, 1e-3, 1e-6}) {
    auto p = random_problem(rng, 60, 4);
    const auto K = svm::kernel_matrix(p.x, 1.0);
    const auto sol = svm::smo_solve(K, p.y, {10.0, tol, 1'000'000, false});
    ASSERT_TRUE(sol.converged);
    EXPECT_LE(sol.max_kkt_violation, tol);
    EXPECT_LE(kkt_violation(K, p.y, sol.alpha, 10.0), tol * (1 + 1e-9) + 1e-12);
    double eq = 0.0;
    for (std::size_t i = 0; i < p.y.size(); ++i) {
      EXPECT_GE(sol.alpha[i], 0.0);
      EXPECT_LE(sol.alpha[i], 10.0);
      eq += sol.alpha[i] * p.y[i];
    }
    EXPECT_NEAR(eq, 0.0, 1e-9);
  }
}

TEST(Smo, XorIsSeparatedWithRbf) {
  const std::vector<FeatureVector> x{{0, 0}, {1, 1}, {0, 1}, {1, 0}};
  const std::vector<int> y{0, 0, 1, 1};
  const auto model = svm::train_kernel_classifier(x, y, 2, {10.0, 1.0, 1e-3, 1'000'000});
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_EQ(svm::predict(model, x[i]).label, y[i]);
}

TEST(Kernel, RbfMatrixIsSymmetricPsdWithUnitDiagonal) {
  std::mt19937_64 rng(1);
  const auto x = oracle::random_points(rng, 30, 5);
  for (double gamma : {0.01, 1.0, 30.0}) {
    const auto K = svm::kernel_matrix(x, gamma);
    for (int i = 0; i < 30; ++i) {
      EXPECT_EQ(K(i, i), 1.0);
      for (int j = 0; j < 30; ++j) {
        EXPECT_EQ(K(i, j), K(j, i));
        EXPECT_NEAR(K(i, j), std::exp(-gamma * std::pow(oracle::euclid(x[i], x[j]), 2)), 1e-12);
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(Scaler, MapsTrainingRangeToUnitIntervalAndZeroesConstants) {
  const std::vector<FeatureVector> train{{1, 5, 7}, {3, 5, 9}, {2, 5, 8}};
  const auto s = svm::MinMaxScaler::fit(train);
  EXPECT_EQ(s.apply(train[0]), (FeatureVector{0, 0, 0}));
  EXPECT_EQ(s.apply(train[1]), (FeatureVector{1, 0, 1}));
  EXPECT_EQ(s.apply(FeatureVector{5, 100, 7.5}), (FeatureVector{2, 0, 0.25}));
}

TEST(Classifier, OneVsRestArgmaxAndValidation) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 0.2);
  std::vector<FeatureVector> x;
  std::vector<int> y;
  const std::vector<FeatureVector> c{{0, 0}, {4, 0}, {0, 4}};
  for (int i = 0; i < 60; ++i) {
    x.push_back({c[i % 3][0] + n(rng), c[i % 3][1] + n(rng)});
    y.push_back(i % 3);
  }
  const auto m = svm::fit_scaled_classifier(x, y, 3, {{1.0}, {1.0}, 5, 0, 1e-3, 1'000'000});
  for (int k = 0; k < 3; ++k) {
    const auto p = svm::predict(m, c[k]);
    EXPECT_EQ(p.label, k);
    EXPECT_EQ(p.decision_values.size(), 3u);
    EXPECT_EQ(std::max_element(p.decision_values.begin(), p.decision_values.end()) - p.decision_values.begin(), k);
  }
  EXPECT_THROW(svm::predict(m, FeatureVector{1.0}), DimensionMismatch);
  EXPECT_THROW(svm::train_kernel_classifier(x, std::vector<int>(60, 1), 3, {}), DegenerateLabels);
}

TEST(GridSearch, PicksBestAndBreaksTiesTowardsSmallerParameters) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 0.1);
  std::vector<FeatureVector> x;
  std::vector<int> y;
  for (int i = 0; i < 40; ++i) {
    x.push_back({(i % 2) * 1.0 + n(rng), n(rng)});
    y.push_back(i % 2);
  }
  const std::vector<double> cs{8, 1, 64}, gs{0.5, 4};
  const auto r = svm::grid_search(x, y, 2, 5, cs, gs, 0);
  ASSERT_EQ(r.surface.size(), 6u);
  double best = -1;
  for (const auto& g : r.surface) best = std::max(best, g.accuracy);
  EXPECT_EQ(r.best_accuracy, best);
  for (const auto& g : r.surface)
    if (g.accuracy == best) {
      EXPECT_EQ(r.best_C, g.C);
      EXPECT_EQ(r.best_gamma, g.gamma);
      break;
    }
  EXPECT_EQ(r.surface.front().C, 1.0);
  EXPECT_EQ(r.surface.front().gamma, 0.5);
}

TEST(GridSearch, DefaultGridsArePowersOfTwo) {
  const auto c = svm::default_c_grid();
  const auto g = svm::default_gamma_grid();
  EXPECT_EQ(c.size(), 11u);
  EXPECT_EQ(c.front(), std::ldexp(1.0, -5));
  EXPECT_EQ(c.back(), std::ldexp(1.0, 15));
  EXPECT_EQ(g.size(), 10u);
  EXPECT_EQ(g.front(), std::ldexp(1.0, -15));
  EXPECT_EQ(g.back(), std::ldexp(1.0, 3));
}

#ifndef ARTINFLUENCE_LDA_HPP
#define ARTINFLUENCE_LDA_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/trigamma.hpp>

#include "artinfluence/core_model.hpp"
#include "artinfluence/error.hpp"
#include "artinfluence/random.hpp"

namespace artinfluence::lda {

inline constexpr double kBetaFloor = 1e-10;

/// Per-class topic model: beta is topics x vocabulary, rows are word
/// distributions; alpha is the symmetric Dirichlet parameter.
struct TopicModel {
  Eigen::MatrixXd beta;
  double alpha = 0.1;

  std::size_t topics() const noexcept { return static_cast<std::size_t>(beta.rows()); }
  std::size_t vocabulary() const noexcept { return static_cast<std::size_t>(beta.cols()); }
};

struct FitOptions {
  std::size_t topics = 20;
  double alpha_init = 0.1;
  bool estimate_alpha = true;
  double em_tol = 1e-4;
  double vi_tol = 1e-6;
  int max_em_iters = 100;
  int max_vi_iters = 100;
  std::uint64_t seed = 0;
};

struct FitResult {
  TopicModel model;
  /// Corpus ELBO after each E-step, in order.
  std::vector<double> elbo_history;
  int em_iterations = 0;
};

namespace detail {

inline double digamma(double x) { return boost::math::digamma(x); }

/// Sparse bag of words: nonzero word ids and their counts.
struct Document {
  std::vector<std::size_t> words;
  std::vector<double> counts;
  double total = 0.0;
};

inline Document to_document(std::span<const double> histogram) {
  Document d;
  for (std::size_t w = 0; w < histogram.size(); ++w) {
    if (histogram[w] < 0.0 || !std::isfinite(histogram[w])) throw InvalidInput("histogram counts must be finite and >= 0");
    if (histogram[w] > 0.0) {
      d.words.push_back(w);
      d.counts.push_back(histogram[w]);
      d.total += histogram[w];
    }
  }
  return d;
}

/// Variational state of one document: gamma (T) and phi (nnz x T).
struct DocState {
  Eigen::VectorXd gamma;
  Eigen::MatrixXd phi;
};

inline void init_state(DocState& s, const Document& doc, std::size_t T, double alpha) {
  s.gamma = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(T), alpha + doc.total / static_cast<double>(T));
  s.phi = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(doc.words.size()), static_cast<Eigen::Index>(T),
                                    1.0 / static_cast<double>(T));
}

inline double doc_elbo(const Document& doc, const DocState& s, const Eigen::MatrixXd& log_beta, double alpha) {
  const Eigen::Index T = s.gamma.size();
  const double gsum = s.gamma.sum();
  const double dg_sum = digamma(gsum);
  double l = std::lgamma(alpha * static_cast<double>(T)) - static_cast<double>(T) * std::lgamma(alpha) -
             std::lgamma(gsum);
  for (Eigen::Index k = 0; k < T; ++k) {
    const double elog = digamma(s.gamma(k)) - dg_sum;
    l += (alpha - 1.0) * elog + std::lgamma(s.gamma(k)) - (s.gamma(k) - 1.0) * elog;
    for (std::size_t n = 0; n < doc.words.size(); ++n) {
      const double p = s.phi(static_cast<Eigen::Index>(n), k);
      if (p > 0.0)
        l += doc.counts[n] * p * (elog - std::log(p) + log_beta(k, static_cast<Eigen::Index>(doc.words[n])));
    }
  }
  return l;
}

/// Mean-field coordinate ascent from the given state: phi given gamma, then
/// gamma given phi. Each half-step maximizes the ELBO exactly in its block,
/// so the ELBO never decreases. Returns the final ELBO.
inline double e_step(const Document& doc, DocState& s, const Eigen::MatrixXd& log_beta, double alpha, double vi_tol,
                     int max_iters) {
  const Eigen::Index T = s.gamma.size();
  double prev = doc_elbo(doc, s, log_beta, alpha);
  Eigen::VectorXd dg(T), row(T);
  for (int it = 0; it < std::max(1, max_iters); ++it) {
    for (Eigen::Index k = 0; k < T; ++k) dg(k) = digamma(s.gamma(k));
    for (std::size_t n = 0; n < doc.words.size(); ++n) {
      const auto w = static_cast<Eigen::Index>(doc.words[n]);
      for (Eigen::Index k = 0; k < T; ++k) row(k) = log_beta(k, w) + dg(k);
      const double mx = row.maxCoeff();
      double z = 0.0;
      for (Eigen::Index k = 0; k < T; ++k) z += (row(k) = std::exp(row(k) - mx));
      s.phi.row(static_cast<Eigen::Index>(n)) = row / z;
    }
    s.gamma.setConstant(alpha);
    for (std::size_t n = 0; n < doc.words.size(); ++n)
      s.gamma += doc.counts[n] * s.phi.row(static_cast<Eigen::Index>(n)).transpose();
    const double cur = doc_elbo(doc, s, log_beta, alpha);
    const bool done = std::abs((prev - cur) / prev) < vi_tol;
    prev = cur;
    if (done) break;
  }
  return prev;
}

/// Maximizes D*(lgamma(T a) - T lgamma(a)) + (a - 1) * ss over a > 0.
/// The objective is concave in a; the root of its derivative is bracketed
/// and refined with safeguarded Newton steps.
inline double optimize_alpha(double alpha, double ss, std::size_t n_docs, std::size_t T) {
  const double D = static_cast<double>(n_docs), Tf = static_cast<double>(T);
  auto df = [&](double a) { return D * Tf * (digamma(Tf * a) - digamma(a)) + ss; };
  auto d2f = [&](double a) {
    return D * Tf * (Tf * boost::math::trigamma(Tf * a) - boost::math::trigamma(a));
  };
  if (T == 1) return alpha;  // alpha does not enter the single-topic bound
  double lo = alpha, hi = alpha;
  while (df(lo) < 0.0 && lo > 1e-10) lo *= 0.5;
  while (df(hi) > 0.0 && hi < 1e10) hi *= 2.0;
  if (df(lo) < 0.0) return lo;
  if (df(hi) > 0.0) return hi;
  double a = std::clamp(alpha, lo, hi);
  for (int it = 0; it < 200; ++it) {
    const double g = df(a);
    if (std::abs(g) < 1e-10 * std::max(1.0, D)) break;
    if (g > 0.0)
      lo = a;
    else
      hi = a;
    double next = a - g / d2f(a);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - a) <= 1e-15 * a) {
      a = next;
      break;
    }
    a = next;
  }
  return a;
}

}  // namespace detail

/// Variational EM over one style's histograms (word counts).
inline FitResult lda_fit(std::span<const FeatureVector> histograms, const FitOptions& opt) {
  if (opt.topics < 1) throw InvalidInput("topic count must be at least 1");
  if (!(opt.alpha_init > 0.0)) throw InvalidInput("alpha must be positive");
  std::vector<detail::Document> docs;
  std::size_t V = 0;
  for (const auto& h : histograms) {
    if (V == 0) V = h.size();
    if (h.size() != V) throw DimensionMismatch("histograms differ in width");
    auto d = detail::to_document(h);
    if (!d.words.empty()) docs.push_back(std::move(d));
  }
  if (docs.empty() || V == 0) throw EmptyCorpus("no non-empty histogram");

  const std::size_t T = opt.topics;
  const auto Ti = static_cast<Eigen::Index>(T), Vi = static_cast<Eigen::Index>(V);
  FitResult result;
  TopicModel& m = result.model;
  m.alpha = opt.alpha_init;
  m.beta.resize(Ti, Vi);
  Rng rng(opt.seed);
  for (Eigen::Index k = 0; k < Ti; ++k) {
    for (Eigen::Index w = 0; w < Vi; ++w) m.beta(k, w) = 1.0 / static_cast<double>(V) + rng.uniform();
    m.beta.row(k) /= m.beta.row(k).sum();
  }

  std::vector<detail::DocState> states(docs.size());
  for (std::size_t d = 0; d < docs.size(); ++d) detail::init_state(states[d], docs[d], T, m.alpha);

  for (int iter = 0; iter < std::max(1, opt.max_em_iters); ++iter) {
    const Eigen::MatrixXd log_beta = m.beta.array().log().matrix();
    double elbo = 0.0;
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(Ti, Vi);
    double ss = 0.0;
    for (std::size_t d = 0; d < docs.size(); ++d) {
      elbo += detail::e_step(docs[d], states[d], log_beta, m.alpha, opt.vi_tol, opt.max_vi_iters);
      const auto& doc = docs[d];
      const auto& s = states[d];
      for (std::size_t n = 0; n < doc.words.size(); ++n)
        expected.col(static_cast<Eigen::Index>(doc.words[n])) +=
            doc.counts[n] * s.phi.row(static_cast<Eigen::Index>(n)).transpose();
      const double dg_sum = detail::digamma(s.gamma.sum());
      for (Eigen::Index k = 0; k < Ti; ++k) ss += detail::digamma(s.gamma(k)) - dg_sum;
    }
    result.elbo_history.push_back(elbo);
    result.em_iterations = iter + 1;
    if (result.elbo_history.size() >= 2) {
      const double prev = result.elbo_history[result.elbo_history.size() - 2];
      if (std::abs((prev - elbo) / prev) < opt.em_tol) break;
    }

    // M-step.
    for (Eigen::Index k = 0; k < Ti; ++k) {
      const double total = expected.row(k).sum();
      for (Eigen::Index w = 0; w < Vi; ++w) {
        const double p = total > 0.0 ? expected(k, w) / total : 1.0 / static_cast<double>(V);
        m.beta(k, w) = std::max(p, kBetaFloor);
      }
      m.beta.row(k) /= m.beta.row(k).sum();
    }
    if (opt.estimate_alpha) m.alpha = detail::optimize_alpha(m.alpha, ss, docs.size(), T);
  }
  return result;
}

struct Score {
  double elbo = 0.0;
  bool empty_document = false;
};

/// Converged ELBO of one document under a fixed model, the surrogate for
/// log p(document | model). Empty documents score 0 and are flagged.
inline Score lda_score(const TopicModel& model, std::span<const double> histogram, double vi_tol = 1e-6,
                       int max_vi_iters = 100) {
  if (histogram.size() != model.vocabulary())
    throw DimensionMismatch("histogram width " + std::to_string(histogram.size()) + " vs vocabulary " +
                            std::to_string(model.vocabulary()));
  const auto doc = detail::to_document(histogram);
  if (doc.words.empty()) return {0.0, true};
  detail::DocState s;
  detail::init_state(s, doc, model.topics(), model.alpha);
  const Eigen::MatrixXd log_beta = model.beta.array().log().matrix();
  return {detail::e_step(doc, s, log_beta, model.alpha, vi_tol, max_vi_iters), false};
}

/// argmax of lda_score across the per-style models; ties go to the lowest
/// style index.
inline int lda_classify(std::span<const TopicModel> models, std::span<const double> histogram) {
  if (models.empty()) throw InvalidInput("no models");
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < models.size(); ++c) {
    if (models[c].vocabulary() != models.front().vocabulary())
      throw DimensionMismatch("models disagree on vocabulary size");
    const double s = lda_score(models[c], histogram).elbo;
    if (s > best_score) {
      best_score = s;
      best = static_cast<int>(c);
    }
  }
  return best;
}

}  // namespace artinfluence::lda

#endif  // ARTINFLUENCE_LDA_HPP

#ifndef ARTINFLUENCE_CROSS_VALIDATION_HPP
#define ARTINFLUENCE_CROSS_VALIDATION_HPP

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "artinfluence/core_model.hpp"
#include "artinfluence/error.hpp"
#include "artinfluence/folds.hpp"
#include "artinfluence/lda.hpp"
#include "artinfluence/svm.hpp"

namespace artinfluence {

/// Rows are true classes, columns predicted classes. `percent` is row
/// normalized to 100; rows of classes without test samples stay zero.
struct ConfusionMatrix {
  std::vector<std::string> class_names;
  Eigen::MatrixXd counts;
  Eigen::MatrixXd percent;
  double overall_accuracy = 0.0;  // percent
  std::vector<double> fold_accuracies;  // percent

  std::size_t classes() const noexcept { return class_names.size(); }

  /// Diagonal of `percent`: the per-style accuracy table.
  std::vector<double> per_class_accuracy() const {
    std::vector<double> out;
    for (Eigen::Index c = 0; c < percent.rows(); ++c) out.push_back(percent(c, c));
    return out;
  }
};

inline ConfusionMatrix make_confusion(std::vector<std::string> class_names, const Eigen::MatrixXd& counts,
                                      std::vector<double> fold_accuracies = {}) {
  ConfusionMatrix cm;
  cm.class_names = std::move(class_names);
  cm.counts = counts;
  cm.percent = Eigen::MatrixXd::Zero(counts.rows(), counts.cols());
  double correct = 0.0, total = 0.0;
  for (Eigen::Index r = 0; r < counts.rows(); ++r) {
    const double row = counts.row(r).sum();
    if (row > 0.0)
      for (Eigen::Index c = 0; c < counts.cols(); ++c) cm.percent(r, c) = 100.0 * counts(r, c) / row;
    correct += counts(r, r);
    total += row;
  }
  cm.overall_accuracy = total > 0.0 ? 100.0 * correct / total : 0.0;
  cm.fold_accuracies = std::move(fold_accuracies);
  return cm;
}

/// A predictor maps one sample to a class index.
using Predictor = std::function<int(std::span<const double>)>;

/// A trainer fits on (samples, labels) and returns a predictor.
using Trainer = std::function<Predictor(std::span<const FeatureVector>, std::span<const int>)>;

/// Stratified k-fold cross-validation. Every step that learns from data
/// (scaling, grid search, topic fitting) runs inside the
/// trainer on the training split only.
inline ConfusionMatrix cross_validate(const Trainer& trainer, std::span<const FeatureVector> samples,
                                      std::span<const int> labels, const std::vector<std::string>& class_names,
                                      int folds = 5, std::uint64_t seed = 0) {
  if (samples.size() != labels.size()) throw InvalidInput("samples and labels differ in length");
  if (folds < 2) throw InvalidInput("folds must be at least 2");
  const std::size_t S = class_names.size();
  std::vector<std::size_t> per_class(S, 0);
  for (int l : labels) {
    if (l < 0 || static_cast<std::size_t>(l) >= S) throw InvalidInput("label out of range");
    ++per_class[static_cast<std::size_t>(l)];
  }
  for (std::size_t c = 0; c < S; ++c)
    if (per_class[c] < static_cast<std::size_t>(folds))
      throw InsufficientSamples("class \"" + class_names[c] + "\" has " + std::to_string(per_class[c]) +
                                " samples, need at least " + std::to_string(folds));

  const auto fold_of = stratified_folds(labels, folds, seed);
  Eigen::MatrixXd counts = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(S), static_cast<Eigen::Index>(S));
  std::vector<double> fold_acc;
  for (int f = 0; f < folds; ++f) {
    std::vector<FeatureVector> tx;
    std::vector<int> ty;
    std::vector<std::size_t> test;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (fold_of[i] == f) {
        test.push_back(i);
      } else {
        tx.push_back(samples[i]);
        ty.push_back(labels[i]);
      }
    }
    const Predictor predict = trainer(tx, ty);
    std::size_t correct = 0;
    for (std::size_t i : test) {
      const int p = predict(samples[i]);
      if (p < 0 || static_cast<std::size_t>(p) >= S) throw InvalidInput("predictor returned an unknown class");
      counts(labels[i], p) += 1.0;
      correct += p == labels[i];
    }
    fold_acc.push_back(test.empty() ? 0.0 : 100.0 * static_cast<double>(correct) / static_cast<double>(test.size()));
  }
  return make_confusion(class_names, counts, std::move(fold_acc));
}

/// Scaling + inner grid search + one-vs-rest RBF classifier.
inline Trainer kernel_trainer(std::size_t n_classes, svm::ScaledFitOptions options) {
  return [n_classes, options](std::span<const FeatureVector> x, std::span<const int> y) -> Predictor {
    auto model = std::make_shared<svm::KernelClassifierModel>(svm::fit_scaled_classifier(x, y, n_classes, options));
    return [model](std::span<const double> s) { return svm::predict(*model, s).label; };
  };
}

/// One topic model per class over count histograms; argmax ELBO.
inline std::vector<lda::TopicModel> fit_style_models(std::span<const FeatureVector> x, std::span<const int> y,
                                                     std::size_t n_classes, const lda::FitOptions& options) {
  std::vector<lda::TopicModel> models;
  for (std::size_t c = 0; c < n_classes; ++c) {
    std::vector<FeatureVector> docs;
    for (std::size_t i = 0; i < x.size(); ++i)
      if (y[i] == static_cast<int>(c)) docs.push_back(x[i]);
    models.push_back(lda::lda_fit(docs, options).model);
  }
  return models;
}

inline Trainer topic_trainer(std::size_t n_classes, lda::FitOptions options) {
  return [n_classes, options](std::span<const FeatureVector> x, std::span<const int> y) -> Predictor {
    auto models = std::make_shared<std::vector<lda::TopicModel>>(fit_style_models(x, y, n_classes, options));
    return [models](std::span<const double> s) { return lda::lda_classify(*models, s); };
  };
}

}  // namespace artinfluence

#endif  // ARTINFLUENCE_CROSS_VALIDATION_HPP

#ifndef ARTINFLUENCE_FOLDS_HPP
#define ARTINFLUENCE_FOLDS_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "artinfluence/error.hpp"
#include "artinfluence/random.hpp"

namespace artinfluence {

/// Stratified fold index per sample: each class's samples (in class order)
/// are shuffled with the seed and dealt round-robin to folds, so every fold
/// gets floor or ceil of n_c / folds samples of class c.
inline std::vector<int> stratified_folds(std::span<const int> labels, int folds, std::uint64_t seed) {
  if (folds < 2) throw InvalidInput("folds must be at least 2");
  std::map<int, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < labels.size(); ++i) by_class[labels[i]].push_back(i);
  Rng rng(seed);
  std::vector<int> fold_of(labels.size(), 0);
  for (auto& [label, idx] : by_class) {
    rng.shuffle(idx);
    for (std::size_t r = 0; r < idx.size(); ++r) fold_of[idx[r]] = static_cast<int>(r % static_cast<std::size_t>(folds));
  }
  return fold_of;
}

}  // namespace artinfluence

#endif  // ARTINFLUENCE_FOLDS_HPP

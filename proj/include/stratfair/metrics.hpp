#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string_view>

#include "stratfair/classifiers.hpp"
#include "stratfair/dataset.hpp"

namespace stratfair {

enum class FairnessMetric { PR, TPR, FPR };

std::string_view to_string(FairnessMetric m);
/// Accepts "PR", "TPR", "FPR" (case-insensitive); throws InvalidArgument.
FairnessMetric parse_metric(std::string_view s);

/// Counts of (group, label, prediction) triples. Every metric in this module
/// is a function of a Tally, so fast sweep paths and direct evaluation share
/// one definition of each rate.
class Tally {
 public:
  void add(int group, int label, int prediction, std::size_t n = 1) {
    counts_[index(group, label, prediction)] += n;
  }
  std::size_t count(int group, int label, int prediction) const {
    return counts_[index(group, label, prediction)];
  }
  std::size_t total() const;
  std::size_t misclassified() const;

  Tally& operator+=(const Tally& o);
  bool operator==(const Tally&) const = default;

 private:
  static std::size_t index(int g, int y, int p) {
    return static_cast<std::size_t>(4 * (g != 0) + 2 * (y != 0) + (p != 0));
  }
  std::array<std::size_t, 8> counts_{};
};

Tally make_tally(const Dataset& ds, std::span<const int> predictions);

/// (#misclassified) / n. Throws InvalidArgument on an empty tally.
double error_rate(const Tally& t);
double error_rate(const Dataset& ds, std::span<const int> predictions);

/// PR = P(f=1 | g), TPR = P(f=1 | y=1, g), FPR = P(f=1 | y=0, g).
/// Throws EmptyConditioningCell when the conditioning cell is empty.
double group_rate(const Tally& t, FairnessMetric m, int group);
double group_rate(const Dataset& ds, std::span<const int> predictions, FairnessMetric m,
                  int group);

/// |M(f; g=1) - M(f; g=0)|.
double unfairness(const Tally& t, FairnessMetric m);
double unfairness(const Dataset& ds, std::span<const int> predictions, FairnessMetric m);

/// nullopt instead of EmptyConditioningCell.
std::optional<double> try_unfairness(const Tally& t, FairnessMetric m);

bool cells_defined(const Tally& t, FairnessMetric m);

template <Classifier C>
double error_rate(const Dataset& ds, const C& f) {
  return error_rate(ds, predict_all(ds, f));
}

template <Classifier C>
double group_rate(const Dataset& ds, const C& f, FairnessMetric m, int group) {
  return group_rate(ds, predict_all(ds, f), m, group);
}

template <Classifier C>
double unfairness(const Dataset& ds, const C& f, FairnessMetric m) {
  return unfairness(ds, predict_all(ds, f), m);
}

}  // namespace stratfair

#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "stratfair/dataset.hpp"

namespace stratfair {

enum class CurveTarget { Label, Group };

/// Binned estimate of P(target = 1 | x_j). Bins with no samples carry
/// count 0 and value NaN; `defined(i)` distinguishes them.
struct CurveEstimate {
  std::vector<double> grid;    // bin centers, strictly increasing
  std::vector<double> values;  // per-bin mean of the target
  std::vector<std::size_t> counts;

  bool defined(std::size_t i) const { return counts[i] > 0; }
  std::size_t defined_count() const;
};

/// Equal-width bins over [0, 1]; x == 1 falls in the last bin. With
/// `label_filter` set only records with that label contribute.
CurveEstimate estimate_conditional(const Dataset& ds, CurveTarget target, std::size_t j,
                                   std::size_t bins = 20,
                                   std::optional<int> label_filter = std::nullopt);

struct CrossingReport {
  std::size_t crossing_count = 0;
  std::optional<double> crossing_location;
  double max_violation = 0.0;
  bool holds_approximately = true;
};

/// Tests whether the curve lies below v up to some z and above v after it.
/// crossing_count counts sign changes of (value - v) over defined bins (bins
/// equal to v carry no sign). max_violation is the smallest, over all split
/// points, of the worst excursion onto the wrong side. crossing_location is
/// the linear interpolation between the bracketing bins at the best split,
/// absent when the curve never strictly passes from below v to at-or-above v.
CrossingReport single_crossing_check(const CurveEstimate& curve, double v, double tol);

enum class Orientation { PositivelyUnimodal, NegativelyUnimodal, Neither };

struct UnimodalityReport {
  std::size_t mode_index = 0;
  Orientation orientation = Orientation::Neither;
  double max_violation = 0.0;
  // Best violation found for each shape, for diagnostics.
  double positive_violation = 0.0;
  double negative_violation = 0.0;
};

/// For every candidate mode r the violation is the largest wrong-direction
/// move on [0, r] plus the largest on [r, n-1] (a rise-then-fall shape is
/// positively unimodal, fall-then-rise negatively). The best mode per shape
/// is kept; a shape is accepted when its violation is <= tol. When both are
/// accepted the hint wins, otherwise the smaller violation, otherwise
/// positive. Throws TooShort below three values.
UnimodalityReport unimodality_check(std::span<const double> values,
                                    std::optional<Orientation> orientation_hint, double tol);

/// Largest drop a[i] - a[k] with i < k (0 for nondecreasing input).
double max_drawdown(std::span<const double> values);
/// Largest rise a[k] - a[i] with i < k (0 for nonincreasing input).
double max_drawup(std::span<const double> values);

}  // namespace stratfair

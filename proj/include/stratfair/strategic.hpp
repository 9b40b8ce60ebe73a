#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "stratfair/classifiers.hpp"
#include "stratfair/dataset.hpp"
#include "stratfair/metrics.hpp"

namespace stratfair {

/// Manipulation budget B >= 0; +infinity is allowed.
class Budget {
 public:
  /// Throws InvalidArgument for negative or NaN values.
  explicit Budget(double value);
  static Budget infinite() { return Budget(std::numeric_limits<double>::infinity()); }

  double value() const noexcept { return value_; }
  bool is_infinite() const noexcept { return value_ == std::numeric_limits<double>::infinity(); }

 private:
  double value_;
};

/// c(x, x') = ||x - x'||_2^p. In one dimension this is |x - x'|^p.
struct PowerCost {
  double p = 1.0;
};

/// c(x, x') = phi(||x - x'||_2) for a caller-supplied nondecreasing phi with
/// phi(0) = 0.
struct MonotoneCost {
  std::function<double(double)> phi;
};

/// Unit cost for moves from a `source` point into a `target` point, free
/// truthful reports, infinite cost otherwise. `witness(x)` returns the point
/// an allowed mover reports.
struct TabularCost {
  std::function<bool(std::span<const double>)> source;
  std::function<bool(std::span<const double>)> target;
  std::function<std::vector<double>(std::span<const double>)> witness;
};

class CostModel {
 public:
  /// Throws InvalidArgument when p < 1.
  static CostModel abs_power(double p);
  static CostModel l2() { return CostModel(PowerCost{1.0}); }
  static CostModel monotone(std::function<double(double)> phi);
  static CostModel tabular(TabularCost table);

  double operator()(std::span<const double> x, std::span<const double> x_reported) const;

  /// True for costs that depend only on the distance moved.
  bool feature_monotone() const noexcept { return !std::holds_alternative<TabularCost>(kind_); }

  /// Cost of moving a distance d (distance-based costs only).
  double of_distance(double d) const;

  /// Largest distance affordable with budget B: B^(1/p) for power costs,
  /// bisection to 1e-10 for general monotone costs. Throws InvalidArgument
  /// for tabular costs.
  double reach(Budget b) const;

  const std::variant<PowerCost, MonotoneCost, TabularCost>& kind() const noexcept {
    return kind_;
  }

 private:
  explicit CostModel(std::variant<PowerCost, MonotoneCost, TabularCost> kind)
      : kind_(std::move(kind)) {}
  std::variant<PowerCost, MonotoneCost, TabularCost> kind_;
};

struct BestResponse {
  std::vector<double> reported;
  bool moved = false;
  double cost_paid = 0.0;
};

/// Agents maximize f(x') - f(x) subject to c(x, x') <= B. A negatively
/// classified agent reports the cheapest positively classified point when
/// it is affordable and otherwise reports truthfully.
BestResponse best_response_threshold(double x, double theta, const CostModel& cost, Budget b);

/// Orthogonal projection onto w^T x' = theta for a unit w under l2 cost.
/// Movers satisfy f(x') = 1 exactly: the step is nudged by a few ulps when
/// rounding would otherwise land just short of the hyperplane.
/// Throws NonUnitNormal unless ||w|| = 1 +- 1e-9.
BestResponse best_response_linear(std::span<const double> x, std::span<const double> w,
                                  double theta, Budget b);

/// Same projection with a general distance-based cost.
BestResponse best_response_linear(std::span<const double> x, const LinearClassifier& f,
                                  const CostModel& cost, Budget b);

/// Dispatch on classifier and cost. Threshold classifiers move only their
/// own feature coordinate. Throws DimensionMismatch when x is too short.
BestResponse best_response(const AnyClassifier& f, std::span<const double> x,
                           const CostModel& cost, Budget b);

/// u = f(x') - f(x) - c(x, x').
double agent_utility(const AnyClassifier& f, std::span<const double> x,
                     std::span<const double> x_reported, const CostModel& cost);

struct InducedDataset {
  Dataset dataset;
  std::vector<bool> moved;
  std::vector<double> cost_paid;
};

/// Every record best-responds; groups, labels and order are preserved.
InducedDataset induce_dataset(const Dataset& ds, const AnyClassifier& f, const CostModel& cost,
                              Budget b);

struct ManipulableSet {
  std::vector<std::size_t> indices;
  double gamma = 0.0;  // |S| / n
};

ManipulableSet manipulable_set(const Dataset& ds, const AnyClassifier& f, const CostModel& cost,
                               Budget b);

/// Unfairness split over the manipulable set S and its complement. Every
/// component is nullopt when a conditioning cell is empty. `combined` is
/// (1 - gamma) * complement + gamma * restricted and is diagnostic only: the
/// mixture identity is exact for neither TPR nor FPR.
struct FairnessDecomposition {
  double gamma = 0.0;
  std::optional<double> u_truthful;    // f on the truthful data
  std::optional<double> u_full;        // f on the induced data
  std::optional<double> u_restricted;  // induced decisions, records in S
  std::optional<double> u_complement;  // induced decisions, records outside S
  std::optional<double> combined;
};

FairnessDecomposition fairness_decomposition(const Dataset& ds, const AnyClassifier& f,
                                             const CostModel& cost, Budget b, FairnessMetric m);

}  // namespace stratfair

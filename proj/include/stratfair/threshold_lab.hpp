#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "stratfair/classifiers.hpp"
#include "stratfair/curves.hpp"
#include "stratfair/dataset.hpp"
#include "stratfair/metrics.hpp"
#include "stratfair/strategic.hpp"

namespace stratfair {

/// Values closer than this are treated as ties by every argmin/argmax and
/// by reversal detection.
inline constexpr double kTieTolerance = 1e-12;

struct ThresholdSweep {
  std::vector<double> grid;
  std::vector<double> error;
  std::vector<std::optional<double>> unfairness;
  FairnessMetric metric = FairnessMetric::PR;
  std::size_t feature = 0;
};

/// grid_size == 0 selects the exact grid: the distinct values of feature j
/// plus 0 and 1 (and one point above the maximum when the maximum is >= 1,
/// so the all-negative classifier is always present). Otherwise grid_size >= 3
/// uniform points on [0, 1]. Evaluation sorts once and reads every grid point
/// off cumulative tallies.
ThresholdSweep sweep_thresholds(const Dataset& ds, std::size_t j, std::size_t grid_size,
                                FairnessMetric m);

struct ThresholdChoice {
  double theta = 0.0;
  std::size_t index = 0;
  bool degenerate = false;  // max_unfair_threshold only: unfairness flat at 0
};

/// Argmin of error; ties go to the smallest theta.
ThresholdChoice optimal_base_threshold(const ThresholdSweep& sweep);

/// Argmin of (1 - alpha) * error + alpha * unfairness over grid points with
/// defined unfairness; ties go to the smallest theta. Throws InvalidArgument
/// for alpha outside [0, 1] or when no grid point has defined unfairness.
ThresholdChoice optimal_alpha_fair_threshold(const ThresholdSweep& sweep, double alpha);

/// Argmax of unfairness; ties go to the smallest theta.
ThresholdChoice max_unfair_threshold(const ThresholdSweep& sweep);

/// Threshold whose truthful decisions equal the strategic decisions of
/// theta: max(0, theta - reach(B)).
double shifted_threshold(double theta, const CostModel& cost, Budget b);

struct BudgetCurves {
  std::vector<double> error;
  std::vector<std::optional<double>> unfairness;
};

struct BudgetSweepResult {
  std::vector<double> budgets;
  BudgetCurves base;  // f_C
  BudgetCurves fair;  // f_F
  FairnessMetric metric = FairnessMetric::PR;
  std::string cost_kind;
};

/// Evaluates the shifted thresholds of theta_C and theta_F on the truthful
/// data for each budget. Throws InvalidArgument unless budgets ascend.
BudgetSweepResult budget_sweep(const Dataset& ds, std::size_t j, double theta_c, double theta_f,
                               const CostModel& cost, const std::vector<double>& budgets,
                               FairnessMetric m);

/// Same curves computed by simulating best responses with induce_dataset.
BudgetSweepResult budget_sweep_simulated(const Dataset& ds, std::size_t j, double theta_c,
                                         double theta_f, const CostModel& cost,
                                         const std::vector<double>& budgets, FairnessMetric m);

struct BudgetInterval {
  double start = 0.0;
  double end = 0.0;
  double magnitude = 0.0;  // max gap inside the interval
  bool degenerate = false;  // the two curves are equal everywhere inside
};

struct ReversalReport {
  std::vector<BudgetInterval> reversal_intervals;  // U_F >= U_C
  double magnitude = 0.0;
  std::vector<BudgetInterval> accuracy_reversal_intervals;  // error_F < error_C
  double accuracy_magnitude = 0.0;

  bool has_nondegenerate_reversal() const;
};

/// Budgets with undefined unfairness on either side break intervals.
ReversalReport detect_fairness_reversal(const BudgetSweepResult& res);

struct AlphaInterval {
  double lo = 0.0;
  double hi = 0.0;
};

struct SufficientConditionReport {
  double x_y = 0.0;
  double x_g = 0.0;
  bool holds = false;  // x_g < x_y
  double p_y = 0.0;
  double p_g = 0.0;
  CrossingReport label_crossing;
  CrossingReport group_crossing;
  double theta_c = 0.0;
  /// Maximal runs of alpha in {0.01, ..., 0.99} with theta_F(alpha) > theta_C.
  std::vector<AlphaInterval> alpha_intervals;
};

struct SufficientConditionOptions {
  std::size_t bins = 20;
  double tol = -1.0;          // < 0 selects 2 / sqrt(n)
  std::size_t grid_size = 0;  // threshold grid for the alpha scan
};

/// Locates x_y where P(y=1|x) crosses P(y=1) and x_g where P(g=1|x) crosses
/// p_g (P(g=1) for PR; for TPR / FPR the group curve and p_g are both taken
/// within y=1 / y=0). Throws NoCrossingFound when either curve has no
/// crossing location.
SufficientConditionReport sufficient_condition_check(const Dataset& ds, std::size_t j,
                                                     FairnessMetric m,
                                                     const SufficientConditionOptions& opts = {});

struct AccuracyReversalReport {
  double mass_base_manipulable = 0.0;  // P(x in X(theta_C, B))
  double mass_fair_manipulable = 0.0;  // P(x in X(theta_F, B))
  double mass_gap = 0.0;               // P(x in [theta_C, theta_F])
  bool condition_holds = false;
  double strategic_accuracy_base = 0.0;
  double strategic_accuracy_fair = 0.0;
  bool fair_more_accurate = false;
};

/// Throws NotSeparable unless labels equal 1[x_j >= t] for some t, and
/// NotSelective unless theta_F > theta_C.
AccuracyReversalReport accuracy_reversal_check(const Dataset& ds, std::size_t j, double theta_c,
                                               double theta_f, const CostModel& cost, Budget b);

}  // namespace stratfair

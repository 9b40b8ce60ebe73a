#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "stratfair/classifiers.hpp"
#include "stratfair/dataset.hpp"
#include "stratfair/metrics.hpp"
#include "stratfair/strategic.hpp"
#include "stratfair/threshold_lab.hpp"

namespace stratfair {

struct TrainOptions {
  std::size_t epochs = 300;
  double step = 1.0;
  std::uint64_t seed = 0;
};

struct TrainedLinear {
  LinearClassifier classifier;
  std::vector<double> loss_history;  // one entry per epoch, nonincreasing
  double objective = 0.0;            // final empirical objective
  bool fell_back_to_base = false;
};

/// Full-batch gradient descent on the mean logistic loss with backtracking,
/// started from a small seeded perturbation. The weight is then normalized
/// and theta recalibrated by an exact error sweep over the scores w^T x.
/// Throws DegenerateLabels when only one label is present.
TrainedLinear train_base_linear(const Dataset& ds, const TrainOptions& opts = {});

/// Minimizes (1 - alpha) * logistic + alpha * (mean sigmoid score on g=1 -
/// mean on g=0)^2, both means taken inside the metric's conditioning label
/// for TPR / FPR. Theta is then re-selected on the scores by an exact sweep
/// of (1 - alpha) * error + alpha * unfairness. If that objective is worse
/// than the base solution's, the base solution is returned.
TrainedLinear train_fair_linear(const Dataset& ds, double alpha, FairnessMetric m,
                                const TrainOptions& opts = {});

/// (1 - alpha) * error + alpha * unfairness; unfairness must be defined.
double alpha_objective(const Dataset& ds, const LinearClassifier& f, double alpha,
                       FairnessMetric m);

struct SelectivityReport {
  bool hadamard_positive = false;  // no coordinate with w_C,i * w_F,i < 0
  bool approx = false;             // negative product mass < magnitude_tol
  double negative_mass_ratio = 0.0;
  std::vector<std::size_t> zero_coordinates;
  double theta_gap = 0.0;  // theta_F - theta_C
};

inline constexpr double kDefaultSelectivityTolerance = 0.10;

SelectivityReport selectivity_check(const LinearClassifier& f_c, const LinearClassifier& f_f,
                                    double magnitude_tol = kDefaultSelectivityTolerance);

/// Offset-shift path: strategic decisions of (w, theta) under l2 cost with
/// budget B equal truthful decisions of (w, theta - B).
BudgetSweepResult linear_budget_sweep(const Dataset& ds, const LinearClassifier& f_c,
                                      const LinearClassifier& f_f,
                                      const std::vector<double>& budgets, FairnessMetric m);

/// Simulation path through induce_dataset with l2 cost.
BudgetSweepResult linear_budget_sweep_simulated(const Dataset& ds, const LinearClassifier& f_c,
                                                const LinearClassifier& f_f,
                                                const std::vector<double>& budgets,
                                                FairnessMetric m);

struct RegionMeasures {
  double mass_s0 = 0.0;      // f_F' = 0 and f_C' = 1 after shifting both by B
  double mass_s1 = 0.0;      // f_F' = 1 and f_C' = 0 after shifting both by B
  double mass_f_only = 0.0;  // f_F = 1 and f_C = 0 at B = 0
};

RegionMeasures region_measures(const Dataset& ds, const LinearClassifier& f_c,
                               const LinearClassifier& f_f, double budget);

/// Allows exactly the moves from {f_C = 1, f_F = 0} to a point that f_F
/// classifies positive, at unit cost. Movers report the nearest boundary
/// point of f_F.
CostModel construct_adversarial_cost(const AnyClassifier& f_c, const AnyClassifier& f_f);

struct SubsetBoundReport {
  std::optional<double> u_fair_strategic;  // U(f_F) under the constructed cost, B = 1
  std::optional<double> u_base_strategic;  // U(f_C) under the constructed cost, B = 1
  std::optional<double> u_base_unbounded;  // U(f_C) under l2 cost, B = infinity
  std::optional<double> u_base_truthful;
  double mass_f_only = 0.0;
  std::optional<double> lhs;  // u_fair_strategic - u_base_strategic
  std::optional<double> rhs;  // u_base_unbounded - mass_f_only
  std::optional<double> rhs_truthful;  // u_base_truthful - mass_f_only
  bool bound_satisfied = false;  // lhs > rhs + 1e-12
  bool bound_equal = false;      // |lhs - rhs| <= 1e-12
};

SubsetBoundReport subset_bound_report(const Dataset& ds, const AnyClassifier& f_c,
                                      const AnyClassifier& f_f, FairnessMetric m);

/// (w, theta + B): under l2 cost with budget B its strategic decisions are
/// the truthful decisions of f.
LinearClassifier fairness_recovery_shift(const LinearClassifier& f, double budget);

struct Link {
  enum class Kind { Logistic, Constant };
  Kind kind = Kind::Logistic;
  double slope = 1.0;
  double intercept = 0.0;  // logistic: sigma(slope * (t - intercept))
  double constant = 0.5;   // constant: probability

  double operator()(double t) const;
  static Link logistic(double slope, double intercept) {
    return {Kind::Logistic, slope, intercept, 0.5};
  }
  static Link constant_probability(double p) { return {Kind::Constant, 1.0, 0.0, p}; }
};

struct MonotoneIndexSpec {
  std::vector<double> v_y;
  std::vector<double> v_g;
  Link phi_y;
  Link phi_g;
  std::size_t sample_size = 0;
  std::uint64_t seed = 0;
  bool advantaged_aligned = false;  // requires v_g * v_y > 0 elementwise
};

/// Throws InvalidSpec describing the first violated constraint.
void validate(const MonotoneIndexSpec& spec);

/// x ~ U[0,1]^d, then y ~ Bernoulli(phi_y(v_y^T x)) and g ~
/// Bernoulli(phi_g(v_g^T x)) independently given x.
Dataset generate_monotone_index(const MonotoneIndexSpec& spec);

}  // namespace stratfair

#include "stratfair/threshold_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "stratfair/error.hpp"

namespace stratfair {

namespace {

std::vector<double> exact_grid(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  const double max_value = values.back();
  values.push_back(0.0);
  values.push_back(1.0);
  if (max_value >= 1.0) {
    values.push_back(std::nextafter(max_value, std::numeric_limits<double>::infinity()));
  }
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  return values;
}

std::vector<double> uniform_grid(std::size_t n) {
  std::vector<double> grid(n);
  for (std::size_t i = 0; i < n; ++i) {
    grid[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return grid;
}

Tally threshold_tally(const Dataset& ds, std::size_t j, double theta) {
  Tally t;
  for (const auto& r : ds) t.add(r.group, r.label, r.features[j] >= theta ? 1 : 0);
  return t;
}

std::string describe(const CostModel& cost) {
  if (const auto* p = std::get_if<PowerCost>(&cost.kind())) {
    return p->p == 1.0 ? "abs" : "abs_power(p=" + std::to_string(p->p) + ")";
  }
  if (std::holds_alternative<MonotoneCost>(cost.kind())) return "monotone";
  return "tabular";
}

void require_ascending(const std::vector<double>& budgets) {
  if (budgets.empty()) throw Error(ErrorKind::InvalidArgument, "budget grid is empty");
  for (std::size_t i = 0; i < budgets.size(); ++i) {
    if (!(budgets[i] >= 0.0)) throw Error(ErrorKind::InvalidArgument, "budgets must be >= 0");
    if (i > 0 && budgets[i] < budgets[i - 1]) {
      throw Error(ErrorKind::InvalidArgument, "budgets must be sorted ascending");
    }
  }
}

void push(BudgetCurves& curves, const Tally& t, FairnessMetric m) {
  curves.error.push_back(error_rate(t));
  curves.unfairness.push_back(try_unfairness(t, m));
}

template <typename Pred>
std::vector<BudgetInterval> runs(const std::vector<double>& budgets, Pred in_run,
                                 const std::vector<double>& gap) {
  std::vector<BudgetInterval> out;
  for (std::size_t i = 0; i < budgets.size();) {
    if (!in_run(i)) {
      ++i;
      continue;
    }
    BudgetInterval iv;
    iv.start = budgets[i];
    iv.degenerate = true;
    double best = 0.0;
    std::size_t k = i;
    for (; k < budgets.size() && in_run(k); ++k) {
      best = std::max(best, gap[k]);
      if (std::abs(gap[k]) > kTieTolerance) iv.degenerate = false;
    }
    iv.end = budgets[k - 1];
    iv.magnitude = best;
    out.push_back(iv);
    i = k;
  }
  return out;
}

}  // namespace

ThresholdSweep sweep_thresholds(const Dataset& ds, std::size_t j, std::size_t grid_size,
                                FairnessMetric m) {
  if (j >= ds.dim()) throw Error(ErrorKind::DimensionMismatch, "feature index out of range");
  if (grid_size != 0 && grid_size < 3) {
    throw Error(ErrorKind::InvalidArgument, "grid_size must be 0 (exact) or >= 3");
  }
  std::vector<double> column = ds.column(j);

  ThresholdSweep sweep;
  sweep.metric = m;
  sweep.feature = j;
  sweep.grid = grid_size == 0 ? exact_grid(column) : uniform_grid(grid_size);

  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return column[a] < column[b]; });

  // totals[g][y] and below[g][y] = records with x < theta
  std::size_t totals[2][2] = {{0, 0}, {0, 0}};
  for (const auto& r : ds) ++totals[r.group][r.label];
  std::size_t below[2][2] = {{0, 0}, {0, 0}};
  std::size_t next = 0;

  sweep.error.reserve(sweep.grid.size());
  sweep.unfairness.reserve(sweep.grid.size());
  for (double theta : sweep.grid) {
    while (next < order.size() && column[order[next]] < theta) {
      const auto& r = ds[order[next]];
      ++below[r.group][r.label];
      ++next;
    }
    Tally t;
    for (int g = 0; g < 2; ++g) {
      for (int y = 0; y < 2; ++y) {
        t.add(g, y, 0, below[g][y]);
        t.add(g, y, 1, totals[g][y] - below[g][y]);
      }
    }
    sweep.error.push_back(error_rate(t));
    sweep.unfairness.push_back(try_unfairness(t, m));
  }
  return sweep;
}

ThresholdChoice optimal_base_threshold(const ThresholdSweep& sweep) {
  if (sweep.grid.empty()) throw Error(ErrorKind::InvalidArgument, "empty sweep");
  const double best = *std::min_element(sweep.error.begin(), sweep.error.end());
  for (std::size_t i = 0; i < sweep.grid.size(); ++i) {
    if (sweep.error[i] <= best + kTieTolerance) return {sweep.grid[i], i, false};
  }
  return {sweep.grid.front(), 0, false};
}

ThresholdChoice optimal_alpha_fair_threshold(const ThresholdSweep& sweep, double alpha) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "alpha must lie in [0, 1]");
  }
  std::vector<double> objective(sweep.grid.size(), std::numeric_limits<double>::infinity());
  bool any = false;
  for (std::size_t i = 0; i < sweep.grid.size(); ++i) {
    if (!sweep.unfairness[i]) continue;
    objective[i] = (1.0 - alpha) * sweep.error[i] + alpha * *sweep.unfairness[i];
    any = true;
  }
  if (!any) throw Error(ErrorKind::InvalidArgument, "unfairness undefined at every grid point");
  const double best = *std::min_element(objective.begin(), objective.end());
  for (std::size_t i = 0; i < objective.size(); ++i) {
    if (objective[i] <= best + kTieTolerance) return {sweep.grid[i], i, false};
  }
  return {sweep.grid.front(), 0, false};
}

ThresholdChoice max_unfair_threshold(const ThresholdSweep& sweep) {
  double best = -1.0;
  for (const auto& u : sweep.unfairness) {
    if (u) best = std::max(best, *u);
  }
  if (best < 0.0) throw Error(ErrorKind::InvalidArgument, "unfairness undefined at every grid point");
  for (std::size_t i = 0; i < sweep.grid.size(); ++i) {
    if (sweep.unfairness[i] && *sweep.unfairness[i] >= best - kTieTolerance) {
      return {sweep.grid[i], i, best <= kTieTolerance};
    }
  }
  return {sweep.grid.front(), 0, true};
}

double shifted_threshold(double theta, const CostModel& cost, Budget b) {
  const double r = cost.reach(b);
  if (r == 0.0 || theta <= 0.0) return theta;
  return std::max(0.0, theta - r);
}

BudgetSweepResult budget_sweep(const Dataset& ds, std::size_t j, double theta_c, double theta_f,
                               const CostModel& cost, const std::vector<double>& budgets,
                               FairnessMetric m) {
  if (j >= ds.dim()) throw Error(ErrorKind::DimensionMismatch, "feature index out of range");
  require_ascending(budgets);
  BudgetSweepResult res;
  res.budgets = budgets;
  res.metric = m;
  res.cost_kind = describe(cost);
  for (double b : budgets) {
    push(res.base, threshold_tally(ds, j, shifted_threshold(theta_c, cost, Budget(b))), m);
    push(res.fair, threshold_tally(ds, j, shifted_threshold(theta_f, cost, Budget(b))), m);
  }
  return res;
}

BudgetSweepResult budget_sweep_simulated(const Dataset& ds, std::size_t j, double theta_c,
                                         double theta_f, const CostModel& cost,
                                         const std::vector<double>& budgets, FairnessMetric m) {
  require_ascending(budgets);
  BudgetSweepResult res;
  res.budgets = budgets;
  res.metric = m;
  res.cost_kind = describe(cost);
  const AnyClassifier f_c = ThresholdClassifier{theta_c, j};
  const AnyClassifier f_f = ThresholdClassifier{theta_f, j};
  for (double b : budgets) {
    const auto induced_c = induce_dataset(ds, f_c, cost, Budget(b));
    push(res.base, make_tally(ds, predict_all(induced_c.dataset, f_c)), m);
    const auto induced_f = induce_dataset(ds, f_f, cost, Budget(b));
    push(res.fair, make_tally(ds, predict_all(induced_f.dataset, f_f)), m);
  }
  return res;
}

bool ReversalReport::has_nondegenerate_reversal() const {
  return std::any_of(reversal_intervals.begin(), reversal_intervals.end(),
                     [](const BudgetInterval& iv) { return !iv.degenerate; });
}

ReversalReport detect_fairness_reversal(const BudgetSweepResult& res) {
  const std::size_t n = res.budgets.size();
  if (res.base.error.size() != n || res.fair.error.size() != n ||
      res.base.unfairness.size() != n || res.fair.unfairness.size() != n) {
    throw Error(ErrorKind::InvalidArgument, "budget sweep arrays are not aligned");
  }
  std::vector<double> u_gap(n, 0.0), e_gap(n, 0.0);
  std::vector<bool> defined(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    defined[i] = res.base.unfairness[i].has_value() && res.fair.unfairness[i].has_value();
    if (defined[i]) u_gap[i] = *res.fair.unfairness[i] - *res.base.unfairness[i];
    e_gap[i] = res.base.error[i] - res.fair.error[i];
  }

  ReversalReport report;
  report.reversal_intervals =
      runs(res.budgets, [&](std::size_t i) { return defined[i] && u_gap[i] >= -kTieTolerance; },
           u_gap);
  report.accuracy_reversal_intervals =
      runs(res.budgets, [&](std::size_t i) { return e_gap[i] > kTieTolerance; }, e_gap);
  for (const auto& iv : report.reversal_intervals) {
    report.magnitude = std::max(report.magnitude, iv.magnitude);
  }
  for (const auto& iv : report.accuracy_reversal_intervals) {
    report.accuracy_magnitude = std::max(report.accuracy_magnitude, iv.magnitude);
  }
  return report;
}

SufficientConditionReport sufficient_condition_check(const Dataset& ds, std::size_t j,
                                                     FairnessMetric m,
                                                     const SufficientConditionOptions& opts) {
  const double tol =
      opts.tol >= 0.0 ? opts.tol : 2.0 / std::sqrt(static_cast<double>(ds.size()));

  std::optional<int> label_filter;
  if (m == FairnessMetric::TPR) label_filter = 1;
  if (m == FairnessMetric::FPR) label_filter = 0;

  SufficientConditionReport report;
  std::size_t n_filtered = 0, g_filtered = 0, y_total = 0;
  for (const auto& r : ds) {
    y_total += static_cast<std::size_t>(r.label);
    if (label_filter && r.label != *label_filter) continue;
    ++n_filtered;
    g_filtered += static_cast<std::size_t>(r.group);
  }
  if (n_filtered == 0) {
    throw Error(ErrorKind::EmptyConditioningCell,
                std::string(to_string(m)) + ": no records with the conditioning label");
  }
  report.p_y = static_cast<double>(y_total) / static_cast<double>(ds.size());
  report.p_g = static_cast<double>(g_filtered) / static_cast<double>(n_filtered);

  const auto label_curve = estimate_conditional(ds, CurveTarget::Label, j, opts.bins);
  const auto group_curve =
      estimate_conditional(ds, CurveTarget::Group, j, opts.bins, label_filter);
  report.label_crossing = single_crossing_check(label_curve, report.p_y, tol);
  report.group_crossing = single_crossing_check(group_curve, report.p_g, tol);
  if (!report.label_crossing.crossing_location) {
    throw Error(ErrorKind::NoCrossingFound, "P(y=1|x) never crosses P(y=1)");
  }
  if (!report.group_crossing.crossing_location) {
    throw Error(ErrorKind::NoCrossingFound, "P(g=1|x) never crosses p_g");
  }
  report.x_y = *report.label_crossing.crossing_location;
  report.x_g = *report.group_crossing.crossing_location;
  report.holds = report.x_g < report.x_y;

  const ThresholdSweep sweep = sweep_thresholds(ds, j, opts.grid_size, m);
  report.theta_c = optimal_base_threshold(sweep).theta;
  double run_start = -1.0;
  double last_alpha = 0.0;
  for (int k = 1; k <= 99; ++k) {
    const double alpha = k / 100.0;
    const bool selective = optimal_alpha_fair_threshold(sweep, alpha).theta > report.theta_c;
    if (selective && run_start < 0.0) run_start = alpha;
    if (!selective && run_start >= 0.0) {
      report.alpha_intervals.push_back({run_start, last_alpha});
      run_start = -1.0;
    }
    last_alpha = alpha;
  }
  if (run_start >= 0.0) report.alpha_intervals.push_back({run_start, last_alpha});
  return report;
}

AccuracyReversalReport accuracy_reversal_check(const Dataset& ds, std::size_t j, double theta_c,
                                               double theta_f, const CostModel& cost, Budget b) {
  if (j >= ds.dim()) throw Error(ErrorKind::DimensionMismatch, "feature index out of range");
  if (!cost.feature_monotone()) {
    throw Error(ErrorKind::InvalidArgument, "accuracy reversal needs a distance-based cost");
  }
  double max_negative = -std::numeric_limits<double>::infinity();
  double min_positive = std::numeric_limits<double>::infinity();
  for (const auto& r : ds) {
    const double x = r.features[j];
    if (r.label == 1) {
      min_positive = std::min(min_positive, x);
    } else {
      max_negative = std::max(max_negative, x);
    }
  }
  if (!(max_negative < min_positive)) {
    throw Error(ErrorKind::NotSeparable, "labels are not a threshold function of the feature");
  }
  if (!(theta_f > theta_c)) {
    throw Error(ErrorKind::NotSelective, "theta_F must exceed theta_C");
  }

  auto can_reach = [&](double x, double theta) {
    return x < theta && cost.of_distance(theta - x) <= b.value();
  };
  std::size_t in_c = 0, in_f = 0, in_gap = 0;
  for (const auto& r : ds) {
    const double x = r.features[j];
    in_c += can_reach(x, theta_c) ? 1 : 0;
    in_f += can_reach(x, theta_f) ? 1 : 0;
    in_gap += (x >= theta_c && x <= theta_f) ? 1 : 0;
  }
  const auto n = static_cast<double>(ds.size());
  AccuracyReversalReport report;
  report.mass_base_manipulable = static_cast<double>(in_c) / n;
  report.mass_fair_manipulable = static_cast<double>(in_f) / n;
  report.mass_gap = static_cast<double>(in_gap) / n;
  report.condition_holds = in_c + in_f >= in_gap;

  const AnyClassifier f_c = ThresholdClassifier{theta_c, j};
  const AnyClassifier f_f = ThresholdClassifier{theta_f, j};
  const Tally t_c = make_tally(ds, predict_all(induce_dataset(ds, f_c, cost, b).dataset, f_c));
  const Tally t_f = make_tally(ds, predict_all(induce_dataset(ds, f_f, cost, b).dataset, f_f));
  report.strategic_accuracy_base = 1.0 - error_rate(t_c);
  report.strategic_accuracy_fair = 1.0 - error_rate(t_f);
  report.fair_more_accurate = t_f.misclassified() < t_c.misclassified();
  return report;
}

}  // namespace stratfair

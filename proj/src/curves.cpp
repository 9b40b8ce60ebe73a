#include "stratfair/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "stratfair/error.hpp"

namespace stratfair {

std::size_t CurveEstimate::defined_count() const {
  return static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [](std::size_t c) { return c > 0; }));
}

CurveEstimate estimate_conditional(const Dataset& ds, CurveTarget target, std::size_t j,
                                   std::size_t bins, std::optional<int> label_filter) {
  if (bins < 2) throw Error(ErrorKind::InvalidArgument, "need at least two bins");
  if (j >= ds.dim()) throw Error(ErrorKind::DimensionMismatch, "feature index out of range");

  std::vector<double> sums(bins, 0.0);
  CurveEstimate curve;
  curve.counts.assign(bins, 0);
  const double width = 1.0 / static_cast<double>(bins);
  for (const auto& r : ds) {
    if (label_filter && r.label != *label_filter) continue;
    const double x = r.features[j];
    auto bin = static_cast<std::size_t>(std::clamp(std::floor(x / width), 0.0,
                                                   static_cast<double>(bins - 1)));
    sums[bin] += target == CurveTarget::Label ? r.label : r.group;
    ++curve.counts[bin];
  }
  curve.grid.resize(bins);
  curve.values.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    curve.grid[b] = (static_cast<double>(b) + 0.5) * width;
    curve.values[b] = curve.counts[b] > 0 ? sums[b] / static_cast<double>(curve.counts[b])
                                          : std::numeric_limits<double>::quiet_NaN();
  }
  return curve;
}

CrossingReport single_crossing_check(const CurveEstimate& curve, double v, double tol) {
  std::vector<double> z, a;
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    if (!curve.defined(i)) continue;
    z.push_back(curve.grid[i]);
    a.push_back(curve.values[i]);
  }
  const std::size_t k = a.size();
  if (k < 2) {
    throw Error(ErrorKind::TooFewDefinedBins,
                "curve has " + std::to_string(k) + " defined bins, need 2");
  }

  CrossingReport report;
  int prev_sign = 0;
  for (double value : a) {
    const int sign = value > v ? 1 : (value < v ? -1 : 0);
    if (sign == 0) continue;
    if (prev_sign != 0 && sign != prev_sign) ++report.crossing_count;
    prev_sign = sign;
  }

  // split m: bins [0, m) should be <= v, bins [m, k) should be >= v
  std::vector<double> above_before(k + 1, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    above_before[i + 1] = std::max(above_before[i], a[i] - v);
  }
  std::vector<double> below_after(k + 1, 0.0);
  for (std::size_t i = k; i-- > 0;) {
    below_after[i] = std::max(below_after[i + 1], v - a[i]);
  }
  auto brackets = [&](std::size_t m) { return m > 0 && m < k && a[m - 1] < v && a[m] >= v; };

  std::size_t best = 0;
  double best_violation = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m <= k; ++m) {
    const double viol = std::max(above_before[m], below_after[m]);
    if (viol < best_violation || (viol == best_violation && brackets(m) && !brackets(best))) {
      best_violation = viol;
      best = m;
    }
  }
  report.max_violation = best_violation;
  report.holds_approximately = best_violation <= tol;
  if (brackets(best)) {
    const double t = (v - a[best - 1]) / (a[best] - a[best - 1]);
    report.crossing_location = z[best - 1] + t * (z[best] - z[best - 1]);
  }
  return report;
}

double max_drawdown(std::span<const double> values) {
  double peak = -std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (double v : values) {
    peak = std::max(peak, v);
    worst = std::max(worst, peak - v);
  }
  return worst;
}

double max_drawup(std::span<const double> values) {
  double trough = std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (double v : values) {
    trough = std::min(trough, v);
    worst = std::max(worst, v - trough);
  }
  return worst;
}

UnimodalityReport unimodality_check(std::span<const double> values,
                                    std::optional<Orientation> orientation_hint, double tol) {
  const std::size_t n = values.size();
  if (n < 3) throw Error(ErrorKind::TooShort, "unimodality needs at least three values");

  // prefix_down[r]: largest drop within [0, r]; prefix_up[r]: largest rise.
  std::vector<double> prefix_down(n, 0.0), prefix_up(n, 0.0);
  double run_max = values[0], run_min = values[0];
  for (std::size_t r = 1; r < n; ++r) {
    prefix_down[r] = std::max(prefix_down[r - 1], run_max - values[r]);
    prefix_up[r] = std::max(prefix_up[r - 1], values[r] - run_min);
    run_max = std::max(run_max, values[r]);
    run_min = std::min(run_min, values[r]);
  }
  // suffix_up[r]: largest rise within [r, n); suffix_down[r]: largest drop.
  std::vector<double> suffix_up(n, 0.0), suffix_down(n, 0.0);
  double tail_max = values[n - 1], tail_min = values[n - 1];
  for (std::size_t r = n - 1; r-- > 0;) {
    suffix_up[r] = std::max(suffix_up[r + 1], tail_max - values[r]);
    suffix_down[r] = std::max(suffix_down[r + 1], values[r] - tail_min);
    tail_max = std::max(tail_max, values[r]);
    tail_min = std::min(tail_min, values[r]);
  }

  std::size_t pos_mode = 0, neg_mode = 0;
  double pos_best = std::numeric_limits<double>::infinity();
  double neg_best = std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < n; ++r) {
    const double pos = prefix_down[r] + suffix_up[r];
    const double neg = prefix_up[r] + suffix_down[r];
    if (pos < pos_best || (pos == pos_best && values[r] >= values[pos_mode])) {
      pos_best = pos;
      pos_mode = r;
    }
    if (neg < neg_best || (neg == neg_best && values[r] <= values[neg_mode])) {
      neg_best = neg;
      neg_mode = r;
    }
  }

  UnimodalityReport report;
  report.positive_violation = pos_best;
  report.negative_violation = neg_best;
  const bool pos_ok = pos_best <= tol;
  const bool neg_ok = neg_best <= tol;
  Orientation chosen;
  if (pos_ok && neg_ok) {
    if (orientation_hint && *orientation_hint != Orientation::Neither) {
      chosen = *orientation_hint;
    } else {
      chosen = neg_best < pos_best ? Orientation::NegativelyUnimodal
                                   : Orientation::PositivelyUnimodal;
    }
  } else if (pos_ok) {
    chosen = Orientation::PositivelyUnimodal;
  } else if (neg_ok) {
    chosen = Orientation::NegativelyUnimodal;
  } else {
    chosen = Orientation::Neither;
  }
  report.orientation = chosen;
  const bool report_negative =
      chosen == Orientation::NegativelyUnimodal ||
      (chosen == Orientation::Neither && neg_best < pos_best);
  report.mode_index = report_negative ? neg_mode : pos_mode;
  report.max_violation = report_negative ? neg_best : pos_best;
  return report;
}

}  // namespace stratfair

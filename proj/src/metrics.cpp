#include "stratfair/metrics.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "stratfair/error.hpp"

namespace stratfair {

std::string_view to_string(FairnessMetric m) {
  switch (m) {
    case FairnessMetric::PR: return "PR";
    case FairnessMetric::TPR: return "TPR";
    case FairnessMetric::FPR: return "FPR";
  }
  return "?";
}

FairnessMetric parse_metric(std::string_view s) {
  std::string up(s);
  std::transform(up.begin(), up.end(), up.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (up == "PR") return FairnessMetric::PR;
  if (up == "TPR") return FairnessMetric::TPR;
  if (up == "FPR") return FairnessMetric::FPR;
  throw Error(ErrorKind::InvalidArgument, "unknown metric '" + std::string(s) + "'");
}

std::size_t Tally::total() const {
  std::size_t n = 0;
  for (auto c : counts_) n += c;
  return n;
}

std::size_t Tally::misclassified() const {
  std::size_t n = 0;
  for (int g = 0; g < 2; ++g) n += count(g, 0, 1) + count(g, 1, 0);
  return n;
}

Tally& Tally::operator+=(const Tally& o) {
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += o.counts_[i];
  return *this;
}

Tally make_tally(const Dataset& ds, std::span<const int> predictions) {
  if (predictions.size() != ds.size()) {
    throw Error(ErrorKind::DimensionMismatch, "prediction count does not match dataset");
  }
  Tally t;
  for (std::size_t i = 0; i < ds.size(); ++i) t.add(ds[i].group, ds[i].label, predictions[i]);
  return t;
}

double error_rate(const Tally& t) {
  const std::size_t n = t.total();
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "error rate of an empty sample");
  return static_cast<double>(t.misclassified()) / static_cast<double>(n);
}

double error_rate(const Dataset& ds, std::span<const int> predictions) {
  return error_rate(make_tally(ds, predictions));
}

namespace {

// (positives, denominator) for the metric's conditioning cell.
std::pair<std::size_t, std::size_t> cell_counts(const Tally& t, FairnessMetric m, int g) {
  switch (m) {
    case FairnessMetric::PR: {
      const std::size_t pos = t.count(g, 0, 1) + t.count(g, 1, 1);
      const std::size_t neg = t.count(g, 0, 0) + t.count(g, 1, 0);
      return {pos, pos + neg};
    }
    case FairnessMetric::TPR:
      return {t.count(g, 1, 1), t.count(g, 1, 1) + t.count(g, 1, 0)};
    case FairnessMetric::FPR:
      return {t.count(g, 0, 1), t.count(g, 0, 1) + t.count(g, 0, 0)};
  }
  return {0, 0};
}

}  // namespace

bool cells_defined(const Tally& t, FairnessMetric m) {
  return cell_counts(t, m, 0).second > 0 && cell_counts(t, m, 1).second > 0;
}

double group_rate(const Tally& t, FairnessMetric m, int group) {
  const auto [pos, den] = cell_counts(t, m, group);
  if (den == 0) {
    throw Error(ErrorKind::EmptyConditioningCell,
                std::string(to_string(m)) + " undefined for group " + std::to_string(group));
  }
  return static_cast<double>(pos) / static_cast<double>(den);
}

double group_rate(const Dataset& ds, std::span<const int> predictions, FairnessMetric m,
                  int group) {
  return group_rate(make_tally(ds, predictions), m, group);
}

double unfairness(const Tally& t, FairnessMetric m) {
  return std::abs(group_rate(t, m, 1) - group_rate(t, m, 0));
}

double unfairness(const Dataset& ds, std::span<const int> predictions, FairnessMetric m) {
  return unfairness(make_tally(ds, predictions), m);
}

std::optional<double> try_unfairness(const Tally& t, FairnessMetric m) {
  if (!cells_defined(t, m)) return std::nullopt;
  return unfairness(t, m);
}

}  // namespace stratfair

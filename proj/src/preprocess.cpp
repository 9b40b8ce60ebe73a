#include "stratfair/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "stratfair/error.hpp"
#include "stratfair/rng.hpp"

namespace stratfair {

double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw Error(ErrorKind::DimensionMismatch, "pearson: length mismatch");
  const std::size_t n = a.size();
  if (n == 0) return 0.0;
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / static_cast<double>(n);
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / static_cast<double>(n);
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0.0 || sbb == 0.0) return 0.0;
  return sab / std::sqrt(saa * sbb);
}

Dataset normalize_feature(const Dataset& ds, std::size_t j) {
  std::vector<double> col = ds.column(j);
  const auto [lo_it, hi_it] = std::minmax_element(col.begin(), col.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  if (!(hi > lo)) {
    throw Error(ErrorKind::ZeroRange, "feature " + std::to_string(j) + " is constant");
  }
  const double range = hi - lo;
  for (double& v : col) v = (v - lo) / range;

  std::vector<double> labels;
  labels.reserve(ds.size());
  for (const auto& r : ds) labels.push_back(static_cast<double>(r.label));
  if (pearson(col, labels) < 0.0) {
    for (double& v : col) v = 1.0 - v;
  }
  return ds.with_column(j, col);
}

Dataset normalize_all(const Dataset& ds) {
  Dataset out = ds;
  for (std::size_t j = 0; j < ds.dim(); ++j) out = normalize_feature(out, j);
  return out;
}

Split shuffle_split(const Dataset& ds, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw Error(ErrorKind::InvalidArgument, "train_fraction must lie in (0, 1)");
  }
  std::vector<std::size_t> order(ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  SplitMix64 rng(seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  const auto n_train = static_cast<std::size_t>(
      std::llround(train_fraction * static_cast<double>(ds.size())));
  if (n_train == 0 || n_train == ds.size()) {
    throw Error(ErrorKind::InvalidArgument, "split leaves one side empty");
  }
  const std::span<const std::size_t> all(order);
  return {ds.subset(all.first(n_train)), ds.subset(all.subspan(n_train))};
}

}  // namespace stratfair

#include "stratfair/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "stratfair/error.hpp"

namespace stratfair {

void validate(const SyntheticSpec& spec) {
  if (spec.sample_size == 0) throw Error(ErrorKind::InvalidSpec, "sample_size must be positive");
  const std::size_t d = spec.cells[0].location.size();
  if (d == 0) throw Error(ErrorKind::InvalidSpec, "cells need at least one feature");
  double total = 0.0;
  for (std::size_t c = 0; c < spec.cells.size(); ++c) {
    const auto& cell = spec.cells[c];
    const std::string where = "cell (g=" + std::to_string(c / 2) + ",y=" + std::to_string(c % 2) + ")";
    if (!(cell.weight >= 0.0) || !std::isfinite(cell.weight)) {
      throw Error(ErrorKind::InvalidSpec, where + ": weight must be nonnegative");
    }
    if (cell.location.size() != d || cell.scale.size() != d) {
      throw Error(ErrorKind::InvalidSpec, where + ": location/scale dimension mismatch");
    }
    for (std::size_t j = 0; j < d; ++j) {
      if (!std::isfinite(cell.location[j])) {
        throw Error(ErrorKind::InvalidSpec, where + ": location must be finite");
      }
      if (!(cell.scale[j] >= 0.0) || !std::isfinite(cell.scale[j])) {
        throw Error(ErrorKind::InvalidSpec, where + ": scale must be nonnegative");
      }
    }
    total += cell.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorKind::InvalidSpec, "weights must sum to 1");
  }
  if (!spec.feature_names.empty() && spec.feature_names.size() != d) {
    throw Error(ErrorKind::InvalidSpec, "feature_names length must match dimension");
  }
}

double sample_truncated_normal(SplitMix64& rng, double location, double scale, int max_attempts) {
  double v = location;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    v = location + scale * rng.normal();
    if (v >= 0.0 && v <= 1.0) return v;
  }
  return std::clamp(v, 0.0, 1.0);
}

Dataset generate_synthetic(const SyntheticSpec& spec) {
  validate(spec);
  std::size_t last_positive = 0;
  for (std::size_t k = 0; k < spec.cells.size(); ++k) {
    if (spec.cells[k].weight > 0.0) last_positive = k;
  }
  SplitMix64 rng(spec.seed);
  std::vector<AgentRecord> records;
  records.reserve(spec.sample_size);
  for (std::size_t i = 0; i < spec.sample_size; ++i) {
    const double u = rng.uniform();
    std::size_t c = last_positive;
    double acc = 0.0;
    for (std::size_t k = 0; k < spec.cells.size(); ++k) {
      if (spec.cells[k].weight == 0.0) continue;
      acc += spec.cells[k].weight;
      if (u < acc) {
        c = k;
        break;
      }
    }
    const auto& cell = spec.cells[c];
    AgentRecord rec;
    rec.group = static_cast<int>(c / 2);
    rec.label = static_cast<int>(c % 2);
    rec.features.reserve(cell.location.size());
    for (std::size_t j = 0; j < cell.location.size(); ++j) {
      rec.features.push_back(sample_truncated_normal(rng, cell.location[j], cell.scale[j]));
    }
    records.push_back(std::move(rec));
  }
  return Dataset(std::move(records), spec.feature_names);
}

}  // namespace stratfair

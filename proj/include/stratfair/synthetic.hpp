#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "stratfair/dataset.hpp"
#include "stratfair/rng.hpp"

namespace stratfair {

/// One (group, label) component of the mixture: a product of Gaussians
/// truncated to [0, 1], one per feature. Scale 0 is a point mass.
struct MixtureCell {
  double weight = 0.0;
  std::vector<double> location;
  std::vector<double> scale;
};

/// Two-group, two-label mixture. Cells are indexed by 2 * group + label.
struct SyntheticSpec {
  std::array<MixtureCell, 4> cells;
  std::size_t sample_size = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> feature_names;  // optional

  static constexpr std::size_t cell_index(int group, int label) {
    return static_cast<std::size_t>(2 * group + label);
  }
  MixtureCell& cell(int group, int label) { return cells[cell_index(group, label)]; }
  const MixtureCell& cell(int group, int label) const { return cells[cell_index(group, label)]; }

  std::size_t dim() const { return cells[0].location.size(); }
};

/// Throws InvalidSpec describing the first violated constraint.
void validate(const SyntheticSpec& spec);

/// Deterministic per seed. Each record picks its cell from the weights, then
/// draws every feature from the cell's truncated Gaussian.
Dataset generate_synthetic(const SyntheticSpec& spec);

/// Truncated-to-[0,1] Gaussian: rejection sampling with at most
/// `max_attempts` proposals, then the last proposal clamped into [0, 1].
double sample_truncated_normal(SplitMix64& rng, double location, double scale,
                               int max_attempts = 10000);

}  // namespace stratfair

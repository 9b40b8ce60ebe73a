#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "stratfair/dataset.hpp"

namespace stratfair {

/// Sample Pearson correlation. Returns 0 when either side has zero variance.
double pearson(std::span<const double> a, std::span<const double> b);

/// Min-max scales feature j to [0, 1]; afterwards, if Cor(x_j, y) < 0 the
/// column is replaced with 1 - x_j so larger values go with label 1.
/// Throws ZeroRange when the column is constant.
Dataset normalize_feature(const Dataset& ds, std::size_t j);

/// normalize_feature over every column.
Dataset normalize_all(const Dataset& ds);

struct Split {
  Dataset train;
  Dataset test;
};

/// Seeded Fisher-Yates shuffle, then the first round(train_fraction * n)
/// records become the training set. Both halves must be nonempty.
Split shuffle_split(const Dataset& ds, double train_fraction, std::uint64_t seed);

}  // namespace stratfair

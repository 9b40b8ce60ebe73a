#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace stratfair {

enum class ErrorKind {
  MissingColumn,
  NonBinaryGroupOrLabel,
  UnparseableNumber,
  EmptyFile,
  ZeroRange,
  InvalidSpec,
  InvalidDataset,
  EmptyConditioningCell,
  TooFewDefinedBins,
  TooShort,
  NonUnitNormal,
  DimensionMismatch,
  NoCrossingFound,
  NotSeparable,
  NotSelective,
  DegenerateLabels,
  InvalidArgument,
  Io,
};

std::string_view to_string(ErrorKind kind);

/// Library-wide exception. `row` is the 1-based data row (header excluded)
/// for ingestion errors; `column` names the offending column when known.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message,
        std::optional<std::size_t> row = std::nullopt,
        std::optional<std::string> column = std::nullopt);

  ErrorKind kind() const noexcept { return kind_; }
  const std::optional<std::size_t>& row() const noexcept { return row_; }
  const std::optional<std::string>& column() const noexcept { return column_; }

 private:
  ErrorKind kind_;
  std::optional<std::size_t> row_;
  std::optional<std::string> column_;
};

}  // namespace stratfair

#include "stratfair/error.hpp"

namespace stratfair {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::MissingColumn: return "MissingColumn";
    case ErrorKind::NonBinaryGroupOrLabel: return "NonBinaryGroupOrLabel";
    case ErrorKind::UnparseableNumber: return "UnparseableNumber";
    case ErrorKind::EmptyFile: return "EmptyFile";
    case ErrorKind::ZeroRange: return "ZeroRange";
    case ErrorKind::InvalidSpec: return "InvalidSpec";
    case ErrorKind::InvalidDataset: return "InvalidDataset";
    case ErrorKind::EmptyConditioningCell: return "EmptyConditioningCell";
    case ErrorKind::TooFewDefinedBins: return "TooFewDefinedBins";
    case ErrorKind::TooShort: return "TooShort";
    case ErrorKind::NonUnitNormal: return "NonUnitNormal";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NoCrossingFound: return "NoCrossingFound";
    case ErrorKind::NotSeparable: return "NotSeparable";
    case ErrorKind::NotSelective: return "NotSelective";
    case ErrorKind::DegenerateLabels: return "DegenerateLabels";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::Io: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& message, std::optional<std::size_t> row,
             std::optional<std::string> column)
    : std::runtime_error(std::string(to_string(kind)) + ": " + message),
      kind_(kind),
      row_(row),
      column_(std::move(column)) {}

}  // namespace stratfair

#include "pcp/error.hpp"

namespace pcp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIndexOutOfBounds: return "IndexOutOfBounds";
    case ErrorKind::kDuplicateCoordinate: return "DuplicateCoordinate";
    case ErrorKind::kNonPositiveValue: return "NonPositiveValue";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kShapeMismatch: return "ShapeMismatch";
    case ErrorKind::kInvalidModel: return "InvalidModel";
    case ErrorKind::kNonFiniteEncountered: return "NonFiniteEncountered";
    case ErrorKind::kEmptySample: return "EmptySample";
    case ErrorKind::kDegenerateTensor: return "DegenerateTensor";
    case ErrorKind::kUnknownMethod: return "UnknownMethod";
    case ErrorKind::kOptionsTypeMismatch: return "OptionsTypeMismatch";
    case ErrorKind::kBudgetOutOfRange: return "BudgetOutOfRange";
    case ErrorKind::kEmptySet: return "EmptySet";
    case ErrorKind::kDivisionByZero: return "DivisionByZero";
    case ErrorKind::kRankMismatch: return "RankMismatch";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kDensityUnachievable: return "DensityUnachievable";
    case ErrorKind::kParseError: return "ParseError";
    case ErrorKind::kNonIntegerValue: return "NonIntegerValue";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what),
      kind_(kind) {}

ParseError::ParseError(std::size_t line, const std::string& what,
                       ErrorKind kind)
    : Error(kind, line > 0 ? "line " + std::to_string(line) + ": " + what
                           : what),
      line_(line) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace pcp

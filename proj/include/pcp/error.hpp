#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace pcp {

enum class ErrorKind {
  kIndexOutOfBounds,
  kDuplicateCoordinate,
  kNonPositiveValue,
  kLengthMismatch,
  kShapeMismatch,
  kInvalidModel,
  kNonFiniteEncountered,
  kEmptySample,
  kDegenerateTensor,
  kUnknownMethod,
  kOptionsTypeMismatch,
  kBudgetOutOfRange,
  kEmptySet,
  kDivisionByZero,
  kRankMismatch,
  kDimensionMismatch,
  kDensityUnachievable,
  kParseError,
  kNonIntegerValue,
  kInvalidArgument,
  kIoError,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries one of the ErrorKind tags so
/// callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failures remember the 1-based line they occurred on (0 if unknown).
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what,
             ErrorKind kind = ErrorKind::kParseError);

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace pcp

#pragma once

#include <stdexcept>
#include <string>

namespace linfilter {

// Exit codes used by the CLI front end.  Library code throws; the CLI maps
// the exception class to a stable process exit code.
enum class ErrorCode : int {
  ok = 0,
  parse = 2,
  dimension = 3,
  inconsistent_model = 4,
  check_failure = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

struct ParseError : Error {
  ParseError(const std::string& file, long line, long column,
             const std::string& what)
      : Error(ErrorCode::parse,
              file + ":" + std::to_string(line) + ":" + std::to_string(column) +
                  ": " + what),
        file(file), line(line), column(column) {}
  std::string file;
  long line;
  long column;
};

struct DimensionMismatch : Error {
  explicit DimensionMismatch(const std::string& what)
      : Error(ErrorCode::dimension, what) {}
};

struct InconsistentTriple : Error {
  explicit InconsistentTriple(const std::string& what)
      : Error(ErrorCode::inconsistent_model, what) {}
};

#define LINFILTER_SIMPLE_ERROR(NAME)                \
  struct NAME : Error {                             \
    explicit NAME(const std::string& what)          \
        : Error(ErrorCode::check_failure, what) {}  \
  }

LINFILTER_SIMPLE_ERROR(NonSymmetric);
LINFILTER_SIMPLE_ERROR(NonFinite);
LINFILTER_SIMPLE_ERROR(NotSquare);
LINFILTER_SIMPLE_ERROR(NonPositive);
LINFILTER_SIMPLE_ERROR(NonDecreasing);
LINFILTER_SIMPLE_ERROR(SparsityViolation);
LINFILTER_SIMPLE_ERROR(DegeneratePivot);
LINFILTER_SIMPLE_ERROR(NegativeEigenvalueBeyondTolerance);
LINFILTER_SIMPLE_ERROR(NegativeErrorBeyondTolerance);
LINFILTER_SIMPLE_ERROR(NotAProjection);
LINFILTER_SIMPLE_ERROR(RankExceeded);
LINFILTER_SIMPLE_ERROR(EmptySampleSet);
LINFILTER_SIMPLE_ERROR(InsufficientOmega);

#undef LINFILTER_SIMPLE_ERROR

}  // namespace linfilter

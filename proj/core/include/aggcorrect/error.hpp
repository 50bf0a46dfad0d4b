// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <stdexcept>
#include <string>

namespace aggcorrect {

/// Reason codes for every failure the library reports. The CLI maps these to
/// its exit-code families (input, numeric, config).
enum class ErrorKind {
  RowSumViolation,
  NegativeEntry,
  SingularMatrix,
  IndexOutOfRange,
  NonFiniteY,
  InvalidK,
  DimensionMismatch,
  BoundaryParameter,
  NotBinary,
  NonPositiveConcentration,
  ConstraintStarvation,
  EmptySamples,
  EmptyConfusionRow,
  UnknownLabel,
  MalformedRow,
  NonNumericY,
  InvalidConfig,
  IoFailure,
  InvalidArgument,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace aggcorrect

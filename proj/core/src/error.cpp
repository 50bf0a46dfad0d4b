// Apache License, Version 2.0, refer to LICENSE.txt
#include "aggcorrect/error.hpp"

namespace aggcorrect {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::RowSumViolation: return "RowSumViolation";
    case ErrorKind::NegativeEntry: return "NegativeEntry";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorKind::NonFiniteY: return "NonFiniteY";
    case ErrorKind::InvalidK: return "InvalidK";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::BoundaryParameter: return "BoundaryParameter";
    case ErrorKind::NotBinary: return "NotBinary";
    case ErrorKind::NonPositiveConcentration: return "NonPositiveConcentration";
    case ErrorKind::ConstraintStarvation: return "ConstraintStarvation";
    case ErrorKind::EmptySamples: return "EmptySamples";
    case ErrorKind::EmptyConfusionRow: return "EmptyConfusionRow";
    case ErrorKind::UnknownLabel: return "UnknownLabel";
    case ErrorKind::MalformedRow: return "MalformedRow";
    case ErrorKind::NonNumericY: return "NonNumericY";
    case ErrorKind::InvalidConfig: return "InvalidConfig";
    case ErrorKind::IoFailure: return "IoFailure";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

}  // namespace aggcorrect

#pragma once

#include <stdexcept>

namespace qcond {

// Base class for all errors thrown by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct ShapeMismatch : Error { using Error::Error; };
struct NotHermitian : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct NotPositive : Error { using Error::Error; };
struct ZeroTrace : Error { using Error::Error; };
struct InvalidDistribution : Error { using Error::Error; };
struct NotTracePreserving : Error { using Error::Error; };
struct NotAResolutionOfIdentity : Error { using Error::Error; };
struct NotUnitary : Error { using Error::Error; };
struct ParameterOutOfRange : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct InconsistentTable : Error { using Error::Error; };
struct ConsistencyResidual : Error { using Error::Error; };
struct EmptyBatch : Error { using Error::Error; };
struct RankTooSmall : Error { using Error::Error; };
struct OutputNotResolutionOfIdentity : Error { using Error::Error; };
struct NotPSD : Error { using Error::Error; };
struct PowerOutOfRange : Error { using Error::Error; };
struct NotDoublyStochastic : Error { using Error::Error; };
struct UnknownCheck : Error { using Error::Error; };
struct UnknownDemo : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct SchemaMismatch : Error { using Error::Error; };

}  // namespace qcond

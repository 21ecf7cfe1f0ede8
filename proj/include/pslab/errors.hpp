#pragma once

#include <stdexcept>
#include <string>

namespace pslab {

// Base class for all recoverable failures raised by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Model construction / evaluation
struct MissingParam : Error { using Error::Error; };
struct ConstraintViolated : Error { using Error::Error; };
struct EvaluationFailure : Error { using Error::Error; };

// Discretization
struct UnsupportedCoefficients : Error { using Error::Error; };
struct SingularNode : Error { using Error::Error; };
struct QuadratureFailure : Error { using Error::Error; };

// Resolvent / eigen machinery
struct ConvergenceFailure : Error { using Error::Error; };
struct EmptyLevel : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };

// Pseudomode construction
struct BranchFailure : Error { using Error::Error; };
struct CenterMismatch : Error { using Error::Error; };
struct ResolutionExceeded : Error { using Error::Error; };
struct OrderingViolated : Error { using Error::Error; };
struct UnderResolved : Error { using Error::Error; };
struct OutsideParabola : Error { using Error::Error; };
struct DecayViolated : Error { using Error::Error; };

// Projections
struct DomainError : Error { using Error::Error; };
struct DefectivePair : Error { using Error::Error; };
struct AmbiguousPairing : Error { using Error::Error; };

// Quadratic symbols
struct NotElliptic : Error { using Error::Error; };
struct NormalizationFailure : Error { using Error::Error; };
struct GridTooSmall : Error { using Error::Error; };

// Instability experiments
struct ResidualTooLarge : Error { using Error::Error; };

}  // namespace pslab

#pragma once

#include <stdexcept>
#include <string>

namespace tlab {

/// Base class for every error thrown by the library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// geometry
struct DegeneratePoint : Error { using Error::Error; };
struct VanishingCurvature : Error { using Error::Error; };

// family constructors
struct NonPositiveRadius : Error { using Error::Error; };
struct BadAngle : Error { using Error::Error; };
struct BadParameters : Error { using Error::Error; };
struct CylindricalRuling : Error { using Error::Error; };
struct StrictionPoint : Error { using Error::Error; };

// profile integration
struct SingularAngle : Error { using Error::Error; };
struct StepFailure : Error { using Error::Error; };
struct WrongInitialConditions : Error { using Error::Error; };
struct NoSolution : Error { using Error::Error; };
struct Inconclusive : Error { using Error::Error; };

// fixed-point solver
struct InverseDomain : Error { using Error::Error; };
struct NegativeRadicand : Error { using Error::Error; };
struct BadEpsilon : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct NotConverged : Error { using Error::Error; };

// phase plane
struct DomainBoundary : Error { using Error::Error; };

// global checks
struct OpenSurface : Error { using Error::Error; };
struct DegenerateG : Error { using Error::Error; };
struct TangentSurfaceCase : Error { using Error::Error; };

// meshing
struct NegativeRadius : Error { using Error::Error; };

}  // namespace tlab

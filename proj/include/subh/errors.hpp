#pragma once

#include <stdexcept>
#include <string>

namespace subh {

// Base type for everything this library throws on purpose.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Configuration / input problems (CLI maps these to exit code 4).
struct ConfigError : Error { using Error::Error; };
struct RealityError : ConfigError { using ConfigError::ConfigError; };
struct NoResonance : ConfigError { using ConfigError::ConfigError; };
struct NoSuchPeriod : ConfigError { using ConfigError::ConfigError; };
struct EnumerationTooLarge : ConfigError { using ConfigError::ConfigError; };

// Structural hypothesis failures of the continuation setup (exit code 2).
// AnisochronyViolation: the frequency map is flat at the resonant orbit.
// MelnikovNoRoot / MelnikovDegenerate: the averaged forcing has no simple
// root in the friction parameter.
// PhaseDegenerate: fixed-phase continuation requested at a point that is not
// a simple zero of the averaged forcing.
struct HypothesisError : Error { using Error::Error; };
struct AnisochronyViolation : HypothesisError { using HypothesisError::HypothesisError; };
struct MelnikovNoRoot : HypothesisError { using HypothesisError::HypothesisError; };
struct MelnikovDegenerate : HypothesisError { using HypothesisError::HypothesisError; };
struct PhaseDegenerate : HypothesisError { using HypothesisError::HypothesisError; };

// Numerical failures (exit code 3 for the shooting oracle, 1 otherwise).
struct SolvabilityFailure : Error { using Error::Error; };
struct BadOrbit : Error { using Error::Error; };
struct StepUnderflow : Error { using Error::Error; };
struct NoConvergence : Error { using Error::Error; };
struct NoExistenceAnywhere : Error { using Error::Error; };

} // namespace subh

#pragma once

#include <stdexcept>
#include <string>

namespace selex {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Input measure / index / size violations.
struct ArgumentError : Error {
  using Error::Error;
};

// N outside {1,2} or mixed dimensions.
struct DimensionError : Error {
  using Error::Error;
};

// Function value not finite at a support point.
struct EvaluationError : Error {
  using Error::Error;
};

// Growth exponent exceeded the configured cap; signals R0 misuse or blow-up.
struct DivergenceError : Error {
  using Error::Error;
};

// Support size beyond a configured cap (LP, direct-ODE oracle).
struct CapacityError : Error {
  using Error::Error;
};

// Adaptive step fell below min_step.
struct StiffnessError : Error {
  StiffnessError(const std::string& msg, double t, double S, double B)
      : Error(msg), t(t), S(S), B(B) {}
  double t, S, B;
};

// Pushforward target bin coverage failure.
struct CoverageError : Error {
  using Error::Error;
};

// Asymptotic-case misuse (e.g. tau requested with zero argmax mass).
struct CaseError : Error {
  using Error::Error;
};

// R0 <= 1: no supercritical prediction exists.
struct SubcriticalError : Error {
  using Error::Error;
};

// Self-similar window not resolved by enough grid points.
struct ResolutionError : Error {
  using Error::Error;
};

}  // namespace selex

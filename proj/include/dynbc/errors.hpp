#pragma once

#include <stdexcept>
#include <string>

namespace dynbc {

// User-facing configuration problems: bad scenario keys, size mismatches,
// invalid mesh parameters. CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical breakdown that is not expected control flow: CG stagnation,
// eigeniteration failure, non-finite values. CLI maps these to exit code 3.
struct NumericalError : std::runtime_error {
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// Nonlinear solver divergence; keeps the last iterate's residual so callers
// can report how far the solve got.
struct SolverError : NumericalError {
  SolverError(const std::string& msg, double last_residual_, int iterations_)
      : NumericalError(msg), last_residual(last_residual_), iterations(iterations_) {}
  double last_residual = 0.0;
  int iterations = 0;
};

}  // namespace dynbc

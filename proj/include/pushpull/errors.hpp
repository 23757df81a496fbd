#pragma once

#include <stdexcept>
#include <string>

namespace pushpull {

/// Graph fails a structural requirement (e.g. strong connectivity).
struct InfeasibleGraphError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Matrix fails a stochasticity or alignment check.
struct InvalidMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Non-finite value produced by the iteration.
struct DivergenceError : std::runtime_error {
  DivergenceError(const std::string& what, int iteration)
      : std::runtime_error(what), iteration(iteration) {}
  int iteration;
};

/// Reference solver exhausted its iteration cap.
struct ConvergenceFailureError : std::runtime_error {
  ConvergenceFailureError(const std::string& what, double achieved)
      : std::runtime_error(what), achieved_gradient_norm(achieved) {}
  double achieved_gradient_norm;
};

/// Contraction-constant radicand outside its admissible interval.
struct CertificateViolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// CSV column missing or mismatched.
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// CSV cell failed to parse; carries the offending row.
struct ParseError : std::runtime_error {
  ParseError(const std::string& what, int row) : std::runtime_error(what), row(row) {}
  int row;
};

/// Bad run configuration (unknown key, out-of-range value).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace pushpull

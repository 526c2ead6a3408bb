#pragma once

#include <stdexcept>
#include <string>

namespace udetect {

// Invalid experiment/model setup detected before any computation starts
// (bad weights, non-integral class sizes, out-of-range parameters).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An iterative solver failed to converge within its budget.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, long long iterations, double residual)
      : std::runtime_error(what), iterations(iterations), residual(residual) {}
  explicit SolverError(const std::string& what) : SolverError(what, 0, 0.0) {}

  long long iterations;
  double residual;
};

}  // namespace udetect

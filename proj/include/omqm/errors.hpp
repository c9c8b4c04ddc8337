// Exception hierarchy shared by every omqm module.
//
// Input errors (bad parameters, bad ordering, bad grids) and numeric errors
// (caustics, non-finite samples, mass leakage) are kept apart so the CLI can
// map them onto distinct exit codes.

#pragma once

#include <stdexcept>
#include <string>

namespace omqm {

enum class ErrorKind { input, numeric };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Non-positive physical constant, empty ensemble, negative count, ...
struct DomainError : Error {
  explicit DomainError(const std::string& what)
      : Error(ErrorKind::input, "domain error: " + what) {}
};

// Gate or path times out of order.
struct OrderingError : Error {
  explicit OrderingError(const std::string& what)
      : Error(ErrorKind::input, "ordering error: " + what) {}
};

// Time step too coarse for the relaxation rate.
struct StepSizeError : Error {
  explicit StepSizeError(const std::string& what)
      : Error(ErrorKind::input, "step-size error: " + what) {}
};

// Non-uniform or malformed time grid.
struct GridError : Error {
  explicit GridError(const std::string& what)
      : Error(ErrorKind::input, "grid error: " + what) {}
};

// Density handed to a propagator does not integrate to one.
struct NormalizationError : Error {
  explicit NormalizationError(const std::string& what)
      : Error(ErrorKind::input, "normalization error: " + what) {}
};

struct ConfigError : Error {
  explicit ConfigError(const std::string& what)
      : Error(ErrorKind::input, "config error: " + what) {}
};

// |sin(omega dt)| below the caustic threshold.
struct CausticError : Error {
  explicit CausticError(const std::string& what)
      : Error(ErrorKind::numeric, "caustic error: " + what) {}
};

// Spatial grid too narrow: stationary mass outside the grid exceeds threshold.
struct CoverageError : Error {
  explicit CoverageError(const std::string& what)
      : Error(ErrorKind::numeric, "coverage error: " + what) {}
};

struct NumericError : Error {
  explicit NumericError(const std::string& what)
      : Error(ErrorKind::numeric, "numeric error: " + what) {}
};

}  // namespace omqm

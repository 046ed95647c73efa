#pragma once

#include <stdexcept>
#include <string>

namespace fomcert {

// Thrown when a matrix argument has the wrong shape or is not symmetric
// where symmetry is required.
struct shape_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Thrown when an operation requires a convergent system (rate < 1) but the
// input diverges, e.g. sensitivity of an unstable method.
struct instability_error : std::domain_error {
  using std::domain_error::domain_error;
};

// Thrown when an iterative solve hits its limits without meeting tolerances.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Thrown when a bound was requested but no certificate could be produced.
struct no_certificate_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fomcert

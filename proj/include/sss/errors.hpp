#pragma once

#include <stdexcept>
#include <string>

namespace sss {

// Base class for all library failures. Numerical failures derive from this
// so callers (and the CLI exit-code mapping) can catch them uniformly.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Covariance construction produced a matrix whose smallest eigenvalue is
// not safely positive; signals an invalid (rho, cross, s, p) combination.
struct NotPositiveDefinite : Error {
  using Error::Error;
};

// Slicing requires at least two observations per slice.
struct TooFewObservations : Error {
  using Error::Error;
};

// The exact restricted eigenvalue would enumerate more than the subset
// budget allows; callers should fall back to the SDP relaxation.
struct EnumerationTooLarge : Error {
  using Error::Error;
};

struct ZeroBeta : Error {
  using Error::Error;
};

// Response vector is identically zero; marginal statistics are undefined.
struct DegenerateResponse : Error {
  using Error::Error;
};

// Calibrated thresholds were produced for a different (n, p, H, ks).
struct ThresholdMismatch : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct IoError : Error {
  using Error::Error;
};

}  // namespace sss

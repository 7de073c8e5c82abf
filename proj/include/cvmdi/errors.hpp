#pragma once

#include <stdexcept>
#include <string>

namespace cvmdi {

/// Base class for all domain errors raised by the library. Configuration
/// and precondition problems use std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Fock truncation too small for the requested state.
class CutoffError : public Error {
 public:
  CutoffError(const std::string& what, int mode) : Error(what), mode_(mode) {}
  int mode() const { return mode_; }

 private:
  int mode_;  // 1 or 2
};

/// Adaptive cutoff search hit the configured hard cap.
class CutoffCapError : public Error {
 public:
  CutoffCapError(const std::string& what, double mean_photons)
      : Error(what), mean_photons_(mean_photons) {}
  double mean_photons() const { return mean_photons_; }

 private:
  double mean_photons_;
};

/// Heralding probability numerically vanishes (T_S = 1 or vacuum input).
class PostSelectionError : public Error {
 public:
  PostSelectionError(const std::string& what, double p) : Error(what), p_(p) {}
  double p_sps() const { return p_; }

 private:
  double p_;
};

/// Symplectic eigenvalue below 1 (outside the clamp band) or a covariance
/// that cannot come from a physical state.
class UnphysicalStateError : public Error {
 public:
  using Error::Error;
};

/// Covariance violates the expected q-p block structure.
class StructureError : public Error {
 public:
  using Error::Error;
};

/// Numerical pathology (negative discriminant, route disagreement).
class NumericError : public Error {
 public:
  using Error::Error;
};

/// Channel parameters cannot be represented (e.g. T_A underflows to zero).
class ChannelError : public Error {
 public:
  using Error::Error;
};

/// max_distance could not bracket the target rate (K below target at L = 0).
class NoBracketError : public Error {
 public:
  using Error::Error;
};

/// Bad run configuration (unknown key, invalid value, unusable flags).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace cvmdi

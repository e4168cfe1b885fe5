#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace pexp {

/// Compact number for messages: 0.5, 1e-05, inf.
inline std::string show(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

/// Bad parameters or malformed input. Maps to CLI exit code 2.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numerical estimate could not be produced (too few usable scales, ...).
/// Maps to CLI exit code 3.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when fractional integration of order s is requested at an exponent
/// p for which the scaling function does not guarantee eta(p) > -s*p.
class AdmissibilityError : public EstimationError {
 public:
  AdmissibilityError(double p, double s, double eta, const std::string& what)
      : EstimationError(what), p_(p), s_(s), eta_(eta) {}

  double p() const noexcept { return p_; }
  double s() const noexcept { return s_; }
  double eta() const noexcept { return eta_; }

 private:
  double p_;
  double s_;
  double eta_;
};

}  // namespace pexp

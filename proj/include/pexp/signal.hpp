#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "pexp/errors.hpp"

namespace pexp {

/// One affine piece rho_n(s) = slope * s + intercept of a concave profile.
struct AffinePiece {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Generator provenance carried alongside the samples.
struct SignalMeta {
  std::string generator;                 // "cusp", "chirp", "comb", ...
  std::map<std::string, double> params;  // named scalar parameters
  std::vector<AffinePiece> pieces;       // general comb only
  int l_max = 0;                         // finest tooth used (combs)
  bool resolution_warning = false;       // finest tooth narrower than 8 samples
  int min_fit_level = 1;                 // finest level a pointwise fit should use

  double param(const std::string& name) const {
    auto it = params.find(name);
    if (it == params.end()) {
      throw InvalidArgument("signal meta has no parameter '" + name + "'");
    }
    return it->second;
  }
};

/// Uniformly sampled real function on [0,1), N = 2^L samples taken at the
/// cell centers x_i = (i + 1/2) / N.
struct Signal {
  std::vector<double> samples;
  double x0 = 0.5;
  int L = 0;
  SignalMeta meta;

  std::size_t size() const noexcept { return samples.size(); }
  double x(std::size_t i) const noexcept {
    return (static_cast<double>(i) + 0.5) / static_cast<double>(samples.size());
  }
};

inline bool is_power_of_two(std::size_t n) noexcept {
  return n != 0 && (n & (n - 1)) == 0;
}

inline int log2_exact(std::size_t n) {
  if (!is_power_of_two(n)) {
    throw InvalidArgument("length " + std::to_string(n) + " is not a power of two");
  }
  int l = 0;
  while ((std::size_t{1} << l) < n) ++l;
  return l;
}

/// Checks the Signal invariants (power-of-two length, L >= 8, finite samples).
inline void validate(const Signal& sig) {
  const int l = log2_exact(sig.samples.size());
  if (l != sig.L) {
    throw InvalidArgument("signal L does not match sample count");
  }
  if (sig.L < 8) throw InvalidArgument("signal needs at least 2^8 samples");
  for (double v : sig.samples) {
    if (!std::isfinite(v)) throw InvalidArgument("signal contains non-finite samples");
  }
  if (!(sig.x0 >= 0.0 && sig.x0 < 1.0)) {
    throw InvalidArgument("x0 must lie in [0,1)");
  }
}

}  // namespace pexp

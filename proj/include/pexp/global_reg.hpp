#pragma once

// Global regularity diagnostics: wavelet structure functions S(j,p), the
// scaling function eta(p), admissibility of p, p0 and the uniform Hoelder
// exponent h_min. All sums skip coefficients whose support wraps the domain.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pexp/errors.hpp"
#include "pexp/regression.hpp"
#include "pexp/wavelet.hpp"

namespace pexp {

/// Default regression range: drop the two finest and the two coarsest levels.
inline FitRange default_fit_range(int J) { return {3, J - 2}; }

inline void validate_fit_range(const FitRange& r, int J) {
  if (r.j1 < 1 || r.j2 > J || r.j1 > r.j2) {
    throw InvalidArgument("fit range [" + std::to_string(r.j1) + ", " + std::to_string(r.j2) +
                          "] is outside levels [1, " + std::to_string(J) + "]");
  }
  if (r.count() < static_cast<int>(kMinFitPoints)) {
    throw InvalidArgument("fit range needs at least 4 levels");
  }
}

/// S(j,p) = 2^{j-L} sum_k |c_{j,k}|^p over non-boundary coefficients, for
/// j = 1..J (index j-1). NaN where a level has no interior coefficient.
inline std::vector<double> structure_function(const WaveletCoeffs& coeffs, double p) {
  if (!(p > 0.0) || std::isinf(p)) throw InvalidArgument("structure function needs finite p > 0");
  std::vector<double> s(static_cast<std::size_t>(coeffs.J), std::numeric_limits<double>::quiet_NaN());
  for (int j = 1; j <= coeffs.J; ++j) {
    const auto& c = coeffs.level(j);
    const auto& mask = coeffs.mask(j);
    double acc = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (mask[k]) continue;
      acc += std::pow(std::abs(c[k]), p);
      any = true;
    }
    if (any) s[static_cast<std::size_t>(j - 1)] = std::exp2(coeffs.log2_scale(j)) * acc;
  }
  return s;
}

/// Slope of log2 S(j,p) against log2 a_j.
inline RegressionFit eta_fit(const WaveletCoeffs& coeffs, double p, const FitRange& range) {
  validate_fit_range(range, coeffs.J);
  const auto s = structure_function(coeffs, p);
  std::vector<std::pair<double, double>> pts;
  for (int j = range.j1; j <= range.j2; ++j) {
    pts.emplace_back(coeffs.log2_scale(j), std::log2(s[static_cast<std::size_t>(j - 1)]));
  }
  return ols_fit(pts, range.j1, range.j2);
}

/// Uniform Hoelder exponent: slope of log2 max_k |c_{j,k}| against log2 a_j.
inline RegressionFit hmin_fit(const WaveletCoeffs& coeffs, const FitRange& range) {
  validate_fit_range(range, coeffs.J);
  std::vector<std::pair<double, double>> pts;
  for (int j = range.j1; j <= range.j2; ++j) {
    const auto& c = coeffs.level(j);
    const auto& mask = coeffs.mask(j);
    double m = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < c.size(); ++k) {
      if (mask[k]) continue;
      m = std::max(m, std::abs(c[k]));
      any = true;
    }
    const double y = any ? std::log2(m) : std::numeric_limits<double>::quiet_NaN();
    pts.emplace_back(coeffs.log2_scale(j), y);
  }
  return ols_fit(pts, range.j1, range.j2);
}

inline double hmin(const WaveletCoeffs& coeffs, const FitRange& range) {
  return hmin_fit(coeffs, range).slope;
}

struct ScalingFunction {
  std::vector<double> p_grid;
  std::vector<double> eta;  // NaN where the fit failed
  std::vector<std::optional<RegressionFit>> fits;
  std::vector<bool> admissible;
  /// Zero of eta; +inf when eta stays positive, 0 when it never is.
  double p0_estimate = 0.0;
  double margin = 2.0;
  FitRange range;
  /// Levels in the fit range whose interior coefficients all vanish.
  std::vector<int> empty_levels;

  std::size_t index_of(double p) const {
    for (std::size_t i = 0; i < p_grid.size(); ++i) {
      if (p_grid[i] == p) return i;
    }
    throw InvalidArgument("p = " + show(p) + " is not on the scaling-function grid");
  }
};

namespace detail {

// eta(p) with p = inf meaning h_min.
inline std::optional<RegressionFit> try_eta(const WaveletCoeffs& coeffs, double p, const FitRange& range) {
  try {
    return std::isinf(p) ? hmin_fit(coeffs, range) : eta_fit(coeffs, p, range);
  } catch (const EstimationError&) {
    return std::nullopt;
  }
}

inline double eta_value(const WaveletCoeffs& coeffs, double p, const FitRange& range) {
  auto f = try_eta(coeffs, p, range);
  return f ? f->slope : std::numeric_limits<double>::quiet_NaN();
}

inline double refine_p0(const WaveletCoeffs& coeffs, double lo, double hi, const FitRange& range) {
  if (std::isinf(hi)) {
    // Bracket the sign change by doubling.
    double probe = lo;
    for (int it = 0; it < 16; ++it) {
      probe *= 2.0;
      const double e = eta_value(coeffs, probe, range);
      if (!(e > 0.0)) {
        hi = probe;
        break;
      }
      lo = probe;
    }
    if (std::isinf(hi)) return std::numeric_limits<double>::infinity();
  }
  for (int it = 0; it < 50 && (hi - lo) > 1e-4 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (eta_value(coeffs, mid, range) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// eta(p) over an ascending grid (may end with +inf, which uses h_min).
/// admissible[i] holds when eta exceeds `margin` slope standard errors.
inline ScalingFunction scaling_function(const WaveletCoeffs& coeffs, const std::vector<double>& p_grid,
                                        const FitRange& range, double margin = 2.0) {
  validate_fit_range(range, coeffs.J);
  if (p_grid.empty()) throw InvalidArgument("p grid must not be empty");
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    if (!(p_grid[i] > 0.0)) throw InvalidArgument("p grid values must be > 0");
    if (i > 0 && !(p_grid[i] > p_grid[i - 1])) throw InvalidArgument("p grid must be ascending");
  }

  ScalingFunction sf;
  sf.p_grid = p_grid;
  sf.margin = margin;
  sf.range = range;
  for (int j = range.j1; j <= range.j2; ++j) {
    const auto& c = coeffs.level(j);
    const auto& mask = coeffs.mask(j);
    bool nonzero = false;
    for (std::size_t k = 0; k < c.size() && !nonzero; ++k) nonzero = !mask[k] && c[k] != 0.0;
    if (!nonzero) sf.empty_levels.push_back(j);
  }

  for (double p : p_grid) {
    auto fit = detail::try_eta(coeffs, p, range);
    const double eta = fit ? fit->slope : std::numeric_limits<double>::quiet_NaN();
    sf.eta.push_back(eta);
    sf.admissible.push_back(fit && eta > margin * fit->stderr_slope);
    sf.fits.push_back(std::move(fit));
  }

  std::size_t first_nonpositive = p_grid.size();
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    if (!(sf.eta[i] > 0.0)) {
      first_nonpositive = i;
      break;
    }
  }
  if (first_nonpositive == p_grid.size()) {
    sf.p0_estimate = std::isinf(p_grid.back())
                         ? std::numeric_limits<double>::infinity()
                         : detail::refine_p0(coeffs, p_grid.back(), std::numeric_limits<double>::infinity(), range);
  } else if (first_nonpositive == 0) {
    sf.p0_estimate = 0.0;
  } else {
    sf.p0_estimate = detail::refine_p0(coeffs, p_grid[first_nonpositive - 1], p_grid[first_nonpositive], range);
  }
  return sf;
}

}  // namespace pexp

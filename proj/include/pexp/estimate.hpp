#pragma once

// Pointwise p-exponent estimation at a location x0.
//
// Two independent routes: the direct local L^p oscillation T^(p)(a, x0)
// computed from samples, and log-log regression of the p-leader (or
// (p,s)-leader) of the dyadic cube containing x0 across scales.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "pexp/errors.hpp"
#include "pexp/global_reg.hpp"
#include "pexp/leaders.hpp"
#include "pexp/regression.hpp"
#include "pexp/signal.hpp"
#include "pexp/wavelet.hpp"

namespace pexp {

enum class PolyMode { zero, constant };

/// How leaders whose window touches the domain edge enter pointwise fits.
/// `automatic` keeps them only when x0's own cube is an edge cube, where no
/// unclipped window exists (e.g. combs analysed at x0 = 0).
enum class BoundaryPolicy { exclude, include, automatic };

inline const std::vector<double>& default_p_grid() {
  static const std::vector<double> grid{0.25, 0.5, 1.0, 2.0, 4.0, 8.0, std::numeric_limits<double>::infinity()};
  return grid;
}

struct DirectTpResult {
  std::vector<double> radii;
  std::vector<double> values;
  /// Slope of log2 T against log2 a; +inf when T vanishes at every radius.
  double estimate = 0.0;
  std::optional<RegressionFit> fit;
};

/// Radii a_j = 2^{j-L} for the levels of a fit range.
inline std::vector<double> dyadic_radii(int L, const FitRange& range) {
  std::vector<double> r;
  for (int j = range.j1; j <= range.j2; ++j) r.push_back(std::exp2(static_cast<double>(j - L)));
  return r;
}

/// T^(p)(a, x0) = ((1/2a) int_{x0-a}^{x0+a} |X - P|^p)^{1/p} by Riemann sums,
/// with the signal extended by zero outside [0,1). P is 0 or the sample mean
/// over the smallest radius.
inline DirectTpResult direct_tp(const Signal& sig, double x0, double p, const std::vector<double>& radii,
                                PolyMode poly = PolyMode::zero) {
  if (!(p >= 1.0)) throw InvalidArgument("direct estimator needs p >= 1");
  if (radii.size() < kMinFitPoints) throw InvalidArgument("direct estimator needs at least 4 radii");
  const std::size_t n = sig.size();
  const auto nd = static_cast<double>(n);
  const double h = 1.0 / nd;

  auto window = [&](double a) {
    if (!(a > 0.0) || (x0 - a < 0.0 && x0 + a > 1.0)) {
      throw InvalidArgument("radius " + show(a) + " exceeds the domain");
    }
    const double lo = std::max(0.0, std::ceil((x0 - a) * nd - 0.5));
    const double hi = std::min(nd - 1.0, std::floor((x0 + a) * nd - 0.5));
    if (hi < lo) throw InvalidArgument("radius " + show(a) + " holds no sample");
    return std::pair{static_cast<std::size_t>(lo), static_cast<std::size_t>(hi)};
  };

  double centre = 0.0;
  if (poly == PolyMode::constant) {
    const double a_min = *std::min_element(radii.begin(), radii.end());
    const auto [lo, hi] = window(a_min);
    for (std::size_t i = lo; i <= hi; ++i) centre += sig.samples[i];
    centre /= static_cast<double>(hi - lo + 1);
  }

  DirectTpResult res;
  res.radii = radii;
  std::vector<std::pair<double, double>> pts;
  bool all_zero = true;
  for (double a : radii) {
    const auto [lo, hi] = window(a);
    double t = 0.0;
    if (std::isinf(p)) {
      for (std::size_t i = lo; i <= hi; ++i) t = std::max(t, std::abs(sig.samples[i] - centre));
    } else {
      double acc = 0.0;
      for (std::size_t i = lo; i <= hi; ++i) acc += std::pow(std::abs(sig.samples[i] - centre), p);
      t = std::pow(acc * h / (2.0 * a), 1.0 / p);
    }
    if (t != 0.0) all_zero = false;
    res.values.push_back(t);
    pts.emplace_back(std::log2(a), std::log2(t));
  }
  if (all_zero) {
    res.estimate = std::numeric_limits<double>::infinity();
    return res;
  }
  res.fit = ols_fit(pts, 0, static_cast<int>(radii.size()) - 1);
  res.estimate = res.fit->slope;
  return res;
}

/// Index of the dyadic cube [2^j k, 2^j (k+1)) holding x0 at level j.
inline std::size_t cube_index(double x0, int L, int j) {
  const std::size_t n = std::size_t{1} << (L - j);
  const auto k = static_cast<std::size_t>(std::floor(x0 * static_cast<double>(n)));
  return std::min(k, n - 1);
}

/// Regresses log2 leader(j, k_j(x0)) on log2 a_j. Zero or excluded entries
/// are dropped and counted in n_excluded.
inline RegressionFit pexp_from_leaders(const LeaderField& field, double x0, const FitRange& range,
                                       BoundaryPolicy policy = BoundaryPolicy::automatic) {
  if (!(x0 >= 0.0 && x0 < 1.0)) throw InvalidArgument("x0 must lie in [0,1)");
  validate_fit_range(range, field.J);
  std::vector<std::pair<double, double>> pts;
  int excluded = 0;
  for (int j = range.j1; j <= range.j2; ++j) {
    const auto& vals = field.level(j);
    const std::size_t k = cube_index(x0, field.L, j);
    const bool edge_cube = (k == 0 || k + 1 == vals.size());
    const bool flagged = field.flag(j)[k] != 0;
    bool keep = true;
    if (flagged) {
      keep = policy == BoundaryPolicy::include || (policy == BoundaryPolicy::automatic && edge_cube);
    }
    const double v = vals[k];
    if (!keep || !(v > 0.0) || !std::isfinite(v)) {
      ++excluded;
      continue;
    }
    pts.emplace_back(field.log2_scale(j), std::log2(v));
  }
  return ols_fit(pts, range.j1, range.j2, excluded);
}

/// h_{p,s}(x0) from (p,s)-leaders. For s > 0 the scaling function must give
/// eta(p) > -s p (h_min > -s for p = inf), otherwise AdmissibilityError.
inline RegressionFit pexp_ps(const WaveletCoeffs& coeffs, double x0, double p, double s, const FitRange& range,
                             BoundaryPolicy policy = BoundaryPolicy::automatic,
                             std::optional<FitRange> eta_range = std::nullopt) {
  if (!(p > 0.0)) throw InvalidArgument("p must be > 0");
  if (!(s >= 0.0)) throw InvalidArgument("fractional order s must be >= 0");
  if (s > 0.0) {
    const FitRange er = eta_range.value_or(default_fit_range(coeffs.J));
    const double eta = detail::eta_value(coeffs, p, er);
    const double bound = std::isinf(p) ? -s : -s * p;
    if (!(eta > bound)) {
      throw AdmissibilityError(p, s, eta,
                               "fractional integration of order " + show(s) +
                                   " is not admissible at p = " + show(p) +
                                   " (eta = " + show(eta) + ")");
    }
  }
  return pexp_from_leaders(compute_leaders(coeffs, p, s), x0, range, policy);
}

struct PExpConfig {
  int n_vanishing = 3;
  /// Decomposition depth; 0 means the deepest level allowed (at most L - 2).
  int J = 0;
  /// Pointwise fit range; j1 = 0 means analysis_range(signal meta, L, J).
  FitRange fit{0, 0};
  /// Range for eta(p) and h_min; j1 = 0 means default_fit_range(J).
  FitRange eta_fit{0, 0};
  double margin = 2.0;
  BoundaryPolicy boundary = BoundaryPolicy::automatic;
  bool direct = true;
  PolyMode poly = PolyMode::zero;
};

inline int resolve_depth(const PExpConfig& cfg, std::size_t n, const WaveletSpec& w) {
  const int deepest = max_level(n, w);
  return cfg.J > 0 ? std::min(cfg.J, deepest) : deepest;
}

inline FitRange resolve_range(const FitRange& r, int J) { return r.j1 > 0 ? r : default_fit_range(J); }

/// Default pointwise range [ceil(L/2), J-2]. Leaders of the finest half of the
/// levels are still dominated by sampling transients (their relative error
/// decays only like 2^{-j}), so they are left out unless asked for.
inline FitRange default_pointwise_range(int L, int J) {
  const int j2 = J - 2;
  const int j1 = std::clamp((L + 1) / 2, 3, std::max(3, j2 - 3));
  return {j1, j2};
}

/// Pointwise range for a given signal: the default, moved coarser when the
/// generator says finer levels are unresolved, and widened to J when fewer
/// than four levels would remain.
inline FitRange analysis_range(const SignalMeta& meta, int L, int J) {
  FitRange r = default_pointwise_range(L, J);
  r.j1 = std::max(r.j1, meta.min_fit_level);
  if (r.j2 - r.j1 < 3) r.j2 = std::min(J, r.j1 + 3);
  if (r.j2 - r.j1 < 3) r.j1 = std::max(1, r.j2 - 3);
  return r;
}

struct PExponentProfile {
  double x0 = 0.0;
  double s = 0.0;
  std::vector<double> p_grid;
  std::vector<double> h_hat;  // NaN where estimation failed
  std::vector<std::optional<RegressionFit>> fits;
  std::vector<bool> admissible;
  std::vector<std::string> errors;  // empty when the fit succeeded
  /// Direct T^(p) estimates (s = 0 and 1 <= p < inf only).
  std::vector<std::optional<DirectTpResult>> direct;
  std::vector<double> eta;
  double p0 = 0.0;
  double hmin = std::numeric_limits<double>::quiet_NaN();
  FitRange fit_range;
  FitRange eta_range;
  std::string wavelet;
  std::vector<std::string> warnings;

  bool valid(std::size_t i) const { return admissible[i] && fits[i].has_value(); }
  std::size_t size() const noexcept { return p_grid.size(); }
  double stderr_at(std::size_t i) const { return fits[i] ? fits[i]->stderr_slope : 0.0; }
};

/// Profile p -> h_{p,s}(x0) from precomputed coefficients.
inline PExponentProfile pexp_profile(const Signal& sig, const WaveletCoeffs& coeffs, double x0,
                                     const std::vector<double>& p_grid, double s, const PExpConfig& cfg,
                                     const std::optional<ScalingFunction>& precomputed = std::nullopt) {
  if (!(s >= 0.0)) throw InvalidArgument("fractional order s must be >= 0");
  PExponentProfile prof;
  prof.x0 = x0;
  prof.s = s;
  prof.p_grid = p_grid;
  prof.fit_range = cfg.fit.j1 > 0 ? cfg.fit : analysis_range(sig.meta, coeffs.L, coeffs.J);
  prof.eta_range = resolve_range(cfg.eta_fit, coeffs.J);
  prof.wavelet = coeffs.wavelet.name();
  validate_fit_range(prof.fit_range, coeffs.J);
  if (prof.fit_range.j1 < sig.meta.min_fit_level) {
    prof.warnings.push_back("fit range starts below the finest resolved level " +
                            std::to_string(sig.meta.min_fit_level));
  }

  const ScalingFunction sf =
      precomputed ? *precomputed : scaling_function(coeffs, p_grid, prof.eta_range, cfg.margin);
  prof.p0 = sf.p0_estimate;
  prof.eta = sf.eta;
  prof.hmin = detail::eta_value(coeffs, std::numeric_limits<double>::infinity(), prof.eta_range);

  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    const double p = p_grid[i];
    const auto& efit = sf.fits[i];
    const double shift = std::isinf(p) ? s : s * p;
    prof.admissible.push_back(efit && sf.eta[i] + shift > cfg.margin * efit->stderr_slope);
    try {
      prof.fits.push_back(pexp_from_leaders(compute_leaders(coeffs, p, s), x0, prof.fit_range, cfg.boundary));
      prof.h_hat.push_back(prof.fits.back()->slope);
      prof.errors.emplace_back();
      if (near_wavelet_limit(prof.h_hat.back(), coeffs.wavelet)) {
        prof.warnings.push_back("estimate at p = " + show(p) + " approaches the number of vanishing moments");
      }
    } catch (const EstimationError& e) {
      prof.fits.emplace_back();
      prof.h_hat.push_back(std::numeric_limits<double>::quiet_NaN());
      prof.errors.emplace_back(e.what());
    }
    std::optional<DirectTpResult> direct;
    if (cfg.direct && s == 0.0 && p >= 1.0 && !std::isinf(p)) {
      try {
        direct = direct_tp(sig, x0, p, dyadic_radii(coeffs.L, prof.fit_range), cfg.poly);
      } catch (const std::exception& e) {
        prof.warnings.push_back("direct estimate at p = " + show(p) + ": " + e.what());
      }
    }
    prof.direct.push_back(std::move(direct));
  }
  return prof;
}

inline PExponentProfile pexp_profile(const Signal& sig, double x0, const std::vector<double>& p_grid, double s,
                                     const PExpConfig& cfg = {}) {
  validate(sig);
  const auto w = WaveletSpec::daubechies(cfg.n_vanishing);
  const auto coeffs = forward_dwt(sig, w, resolve_depth(cfg, sig.size(), w));
  return pexp_profile(sig, coeffs, x0, p_grid, s, cfg);
}

}  // namespace pexp

#pragma once

// Singularity taxonomy from p-exponent profiles before and after fractional
// integration: canonical, oscillating (balanced or lacunary), inadmissible.

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "pexp/errors.hpp"
#include "pexp/estimate.hpp"
#include "pexp/global_reg.hpp"
#include "pexp/signal.hpp"
#include "pexp/wavelet.hpp"

namespace pexp {

enum class SingularityLabel { canonical, oscillating_balanced, oscillating_lacunary, inadmissible, indeterminate };

inline std::string to_string(SingularityLabel l) {
  switch (l) {
    case SingularityLabel::canonical: return "canonical";
    case SingularityLabel::oscillating_balanced: return "oscillating_balanced";
    case SingularityLabel::oscillating_lacunary: return "oscillating_lacunary";
    case SingularityLabel::inadmissible: return "inadmissible";
    case SingularityLabel::indeterminate: return "indeterminate";
  }
  return "indeterminate";
}

struct ClassifyConfig {
  PExpConfig pexp;
  std::vector<double> p_grid = default_p_grid();
  std::vector<double> s_list{0.5, 1.0};
  double tol_invariance = 0.1;
  double tol_canonical = 0.15;
  double beta_significance = 0.1;
};

struct SingularityReport {
  SingularityLabel label = SingularityLabel::indeterminate;
  bool p_invariant = false;
  bool canonical_test = false;
  double beta_hat = 0.0;
  /// Per-s oscillation exponents, aligned with s_list (NaN when undefined).
  std::vector<double> beta_per_s;
  std::vector<std::string> reasons;
  PExponentProfile profile_s0;
  std::vector<PExponentProfile> profiles_s;
  ClassifyConfig config;
};

/// Indices valid in `a` and also in every profile of `others`.
inline std::vector<std::size_t> jointly_valid(const PExponentProfile& a, const std::vector<const PExponentProfile*>& others) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!a.valid(i)) continue;
    bool ok = true;
    for (const auto* o : others) {
      if (o->p_grid != a.p_grid) throw InvalidArgument("profiles must share the same p grid");
      ok = ok && o->valid(i);
    }
    if (ok) idx.push_back(i);
  }
  return idx;
}

/// max - min of the valid estimates is within tol + 2 * (largest stderr).
inline bool check_p_invariant(const PExponentProfile& prof, double tol) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double se = 0.0;
  int n = 0;
  for (std::size_t i = 0; i < prof.size(); ++i) {
    if (!prof.valid(i)) continue;
    lo = std::min(lo, prof.h_hat[i]);
    hi = std::max(hi, prof.h_hat[i]);
    se = std::max(se, prof.stderr_at(i));
    ++n;
  }
  if (n < 3) throw EstimationError("p-invariance needs at least 3 valid estimates, got " + std::to_string(n));
  return hi - lo <= tol + 2.0 * se;
}

/// Every tested s shifts every jointly valid estimate by s, within tol.
inline bool check_canonical(const PExponentProfile& s0, const std::vector<PExponentProfile>& shifted, double tol) {
  if (shifted.empty()) throw InvalidArgument("canonical test needs at least one s > 0");
  bool any = false;
  bool ok = true;
  for (const auto& ps : shifted) {
    if (!(ps.s > 0.0)) throw InvalidArgument("canonical test needs s > 0");
    for (std::size_t i : jointly_valid(s0, {&ps})) {
      any = true;
      ok = ok && std::abs(ps.h_hat[i] - s0.h_hat[i] - ps.s) <= tol;
    }
  }
  if (!any) throw EstimationError("no p is valid both with and without integration");
  return ok;
}

/// beta = median over jointly valid p of (h_{p,s} - h_p)/s - 1, floored at 0.
inline double oscillation_exponent(const PExponentProfile& s0, const PExponentProfile& ps, double s) {
  if (!(s > 0.0)) throw InvalidArgument("oscillation exponent needs s > 0");
  std::vector<double> r;
  for (std::size_t i : jointly_valid(s0, {&ps})) r.push_back((ps.h_hat[i] - s0.h_hat[i]) / s - 1.0);
  if (r.empty()) throw EstimationError("no p is valid both with and without integration");
  std::sort(r.begin(), r.end());
  const std::size_t m = r.size() / 2;
  const double med = r.size() % 2 ? r[m] : 0.5 * (r[m - 1] + r[m]);
  return std::max(0.0, med);
}

namespace detail {

inline double median(std::vector<double> v) {
  std::erase_if(v, [](double x) { return std::isnan(x); });
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace detail

inline SingularityReport classify_singularity(const Signal& sig, double x0, const ClassifyConfig& cfg = {}) {
  validate(sig);
  SingularityReport rep;
  rep.config = cfg;
  const auto w = WaveletSpec::daubechies(cfg.pexp.n_vanishing);
  const auto coeffs = forward_dwt(sig, w, resolve_depth(cfg.pexp, sig.size(), w));
  const FitRange er = resolve_range(cfg.pexp.eta_fit, coeffs.J);
  const auto sf = scaling_function(coeffs, cfg.p_grid, er, cfg.pexp.margin);

  rep.profile_s0 = pexp_profile(sig, coeffs, x0, cfg.p_grid, 0.0, cfg.pexp, sf);
  for (double s : cfg.s_list) rep.profiles_s.push_back(pexp_profile(sig, coeffs, x0, cfg.p_grid, s, cfg.pexp, sf));

  if (std::none_of(sf.admissible.begin(), sf.admissible.end(), [](bool b) { return b; })) {
    rep.label = SingularityLabel::inadmissible;
    rep.reasons.push_back("eta(p) is not significantly positive at any grid p");
    return rep;
  }

  try {
    rep.p_invariant = check_p_invariant(rep.profile_s0, cfg.tol_invariance);
  } catch (const EstimationError& e) {
    rep.reasons.emplace_back(e.what());
    return rep;
  }
  try {
    rep.canonical_test = check_canonical(rep.profile_s0, rep.profiles_s, cfg.tol_canonical);
  } catch (const std::exception& e) {
    rep.reasons.emplace_back(e.what());
    return rep;
  }
  for (std::size_t k = 0; k < cfg.s_list.size(); ++k) {
    try {
      rep.beta_per_s.push_back(oscillation_exponent(rep.profile_s0, rep.profiles_s[k], cfg.s_list[k]));
    } catch (const EstimationError&) {
      rep.beta_per_s.push_back(std::numeric_limits<double>::quiet_NaN());
    }
  }
  const double beta = detail::median(rep.beta_per_s);

  if (rep.canonical_test) {
    if (rep.p_invariant) {
      rep.label = SingularityLabel::canonical;
    } else {
      rep.reasons.push_back("shifts look canonical but the profile varies with p");
    }
    return rep;
  }
  rep.beta_hat = std::isnan(beta) ? 0.0 : beta;
  if (!rep.p_invariant) {
    rep.label = SingularityLabel::oscillating_lacunary;
  } else if (rep.beta_hat > cfg.beta_significance) {
    rep.label = SingularityLabel::oscillating_balanced;
  } else {
    rep.reasons.push_back("shift departs from s but the oscillation exponent is not significant");
  }
  return rep;
}

}  // namespace pexp

#pragma once

// Reference signals with closed-form p-exponent profiles at a known location.
//
// Every generator samples on the cell-centre grid x_i = (i + 1/2) / N, so a
// singularity placed at a dyadic x0 never lands on a sample and divergent
// cusps and chirps stay finite.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "pexp/errors.hpp"
#include "pexp/signal.hpp"

namespace pexp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct CombSpec {
  double alpha = 1.0;
  double gamma = 2.0;

  void validate() const {
    if (!(gamma > 1.0)) throw InvalidArgument("comb gamma must be > 1");
    if (!(alpha > -gamma)) throw InvalidArgument("comb requires alpha > -gamma");
  }
};

/// Finite family of affine pieces defining rho(s) = min_n (a_n s + b_n).
struct AffineFamily {
  std::vector<AffinePiece> pieces;
  double p0 = kInf;
  /// Multiply tooth l by 1/l^2 as in the original construction.
  bool l2_damping = false;

  double rho(double s) const {
    double r = kInf;
    for (const auto& pc : pieces) r = std::min(r, pc.slope * s + pc.intercept);
    return r;
  }

  void validate() const {
    if (pieces.empty()) throw InvalidArgument("affine family needs at least one piece");
    if (!(p0 > 0.0)) throw InvalidArgument("affine family p0 must be > 0");
    for (const auto& pc : pieces) {
      if (!std::isfinite(pc.slope) || !std::isfinite(pc.intercept)) {
        throw InvalidArgument("affine piece coefficients must be finite");
      }
      // nondecreasing rho; width exponent (a+1) l must exceed the position l
      if (pc.slope < 0.0) throw InvalidArgument("affine slopes must be >= 0");
      // local integrability: sum 2^{-(a+1+b) l} < inf
      if (!(pc.slope + 1.0 + pc.intercept > 0.0)) {
        throw InvalidArgument("affine piece violates local integrability (a+1+b > 0)");
      }
    }
    const double s_lo = std::isinf(p0) ? 0.0 : 1.0 / p0;
    if (rho(s_lo) < -s_lo - 1e-12) {
      throw InvalidArgument("rho(s) must stay >= -1/p0");
    }
  }
};

/// Log-periodic profiles for a self-similar singularity. Each profile is one
/// period sampled uniformly in u = ln|x - x0| over [0, ln(ratio)).
struct SelfSimilarSpec {
  double alpha = 0.5;
  double ratio = 2.0;
  std::vector<double> omega_plus;
  std::vector<double> omega_minus;

  static SelfSimilarSpec from_functions(double alpha, double ratio,
                                        const std::function<double(double)>& plus,
                                        const std::function<double(double)>& minus,
                                        std::size_t samples_per_period = 256) {
    SelfSimilarSpec spec{alpha, ratio, {}, {}};
    const double period = std::log(ratio);
    spec.omega_plus.resize(samples_per_period);
    spec.omega_minus.resize(samples_per_period);
    for (std::size_t m = 0; m < samples_per_period; ++m) {
      const double u = period * static_cast<double>(m) / static_cast<double>(samples_per_period);
      spec.omega_plus[m] = plus(u);
      spec.omega_minus[m] = minus(u);
    }
    return spec;
  }

  void validate() const {
    if (!(ratio > 1.0)) throw InvalidArgument("self-similar ratio must be > 1");
    if (!(alpha > -1.0)) throw InvalidArgument("self-similar alpha must be > -1");
    if (omega_plus.empty() || omega_minus.empty()) {
      throw InvalidArgument("self-similar profiles must not be empty");
    }
    for (double v : omega_plus) {
      if (!std::isfinite(v)) throw InvalidArgument("omega_plus has non-finite samples");
    }
    for (double v : omega_minus) {
      if (!std::isfinite(v)) throw InvalidArgument("omega_minus has non-finite samples");
    }
  }

  /// Linear interpolation of a one-period profile at log-coordinate u.
  static double eval(const std::vector<double>& omega, double u, double ratio) {
    const double period = std::log(ratio);
    double phase = u / period;
    phase -= std::floor(phase);
    const double pos = phase * static_cast<double>(omega.size());
    auto i0 = static_cast<std::size_t>(pos);
    if (i0 >= omega.size()) i0 = 0;
    const double t = pos - static_cast<double>(i0);
    const std::size_t i1 = (i0 + 1) % omega.size();
    return (1.0 - t) * omega[i0] + t * omega[i1];
  }
};

enum class ProfileKind { cusp, chirp, comb, general_comb, selfsimilar, cusp_plus_chirp, white_noise };

inline std::string to_string(ProfileKind k) {
  switch (k) {
    case ProfileKind::cusp: return "cusp";
    case ProfileKind::chirp: return "chirp";
    case ProfileKind::comb: return "comb";
    case ProfileKind::general_comb: return "general_comb";
    case ProfileKind::selfsimilar: return "selfsimilar";
    case ProfileKind::cusp_plus_chirp: return "cusp_plus_chirp";
    case ProfileKind::white_noise: return "wgn";
  }
  return "unknown";
}

/// Closed-form p -> h_p(x0) for a generated signal.
struct TheoreticalProfile {
  ProfileKind kind = ProfileKind::cusp;
  double alpha = 0.0;
  double gamma = 0.0;  // comb width exponent, or cusp exponent of cusp+chirp
  double beta_osc = 0.0;
  double p0 = kInf;
  std::vector<AffinePiece> pieces;

  /// h_p at x0. Combs follow rho(1/p) for p >= 1; below p = 1 the p-leader
  /// exponent saturates at rho(1), because a leader is bounded below by its
  /// own coefficient, which scales like the local L^1 average. White noise
  /// has no p-exponent (NaN).
  double h(double p) const {
    switch (kind) {
      case ProfileKind::cusp:
      case ProfileKind::chirp:
      case ProfileKind::selfsimilar:
      case ProfileKind::cusp_plus_chirp:
        return alpha;
      case ProfileKind::comb: {
        const double r = std::isinf(p) ? 0.0 : std::min(1.0, 1.0 / p);
        return alpha + (gamma - 1.0) * r;
      }
      case ProfileKind::general_comb: {
        const double r = std::isinf(p) ? 0.0 : std::min(1.0, 1.0 / p);
        double v = kInf;
        for (const auto& pc : pieces) v = std::min(v, pc.slope * r + pc.intercept);
        return v;
      }
      case ProfileKind::white_noise:
        return std::numeric_limits<double>::quiet_NaN();
    }
    return std::numeric_limits<double>::quiet_NaN();
  }

  /// True when h_p is a valid prediction (p inside the local L^p range).
  bool defined_at(double p) const {
    if (kind == ProfileKind::white_noise) return false;
    return std::isinf(p0) ? true : p < p0;
  }
};

/// Wavelet scaling function of white Gaussian noise, eta(p) = -p/2.
constexpr double white_noise_eta(double p) noexcept { return -p / 2.0; }

namespace detail {

inline std::size_t checked_size(int L) {
  if (L < 8 || L > 28) throw InvalidArgument("L must lie in [8, 28]");
  return std::size_t{1} << L;
}

inline double p0_from_exponent(double alpha) {
  return alpha >= 0.0 ? kInf : -1.0 / alpha;
}

inline bool is_even_natural(double a) {
  return a >= 0.0 && std::floor(a) == a && std::fmod(a, 2.0) == 0.0;
}

// Wavelets at scale a respond to the oscillation at scale a^{1+beta}, which
// point samples resolve only for a >= 2^{-L beta/(1+beta)}.
inline int resonance_level(double beta, int L) {
  return std::max(1, static_cast<int>(std::ceil(L * beta / (1.0 + beta) - 1e-9)));
}

inline void check_x0(double x0) {
  if (!(x0 >= 0.0 && x0 < 1.0)) throw InvalidArgument("x0 must lie in [0,1)");
}

struct Tooth {
  int l = 0;
  double start = 0.0;
  double width = 0.0;
  double height = 0.0;
};

/// Writes each tooth's height into the samples whose centres fall in
/// [start, start + width].
inline void paint_teeth(std::vector<double>& samples, const std::vector<Tooth>& teeth) {
  const auto n = static_cast<double>(samples.size());
  for (const auto& t : teeth) {
    const double lo = std::ceil(t.start * n - 0.5);
    const double hi = std::floor((t.start + t.width) * n - 0.5);
    for (double i = std::max(lo, 0.0); i <= hi && i < n; i += 1.0) {
      samples[static_cast<std::size_t>(i)] = t.height;
    }
  }
}

// splitmix64 finaliser; the counter-based stream is hash(seed, index).
inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline double counter_uniform(std::uint64_t seed, std::uint64_t counter) noexcept {
  const std::uint64_t h = mix64(mix64(seed) ^ mix64(counter ^ 0x5851f42d4c957f2dULL));
  // (0, 1]
  return (static_cast<double>(h >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace detail

/// Teeth of the lacunary comb: height 2^{-alpha l} on [2^{-l}, 2^{-l} + 2^{-gamma l}],
/// keeping only teeth at least one sample wide.
inline std::vector<detail::Tooth> comb_teeth(const CombSpec& spec, int L) {
  spec.validate();
  std::vector<detail::Tooth> teeth;
  for (int l = 1; spec.gamma * l <= static_cast<double>(L); ++l) {
    teeth.push_back({l, std::exp2(-static_cast<double>(l)), std::exp2(-spec.gamma * l),
                     std::exp2(-spec.alpha * l)});
  }
  return teeth;
}

/// Teeth of F_{theta,omega}: tooth l = 2^n (2k+1) uses piece n mod M with
/// omega(l) = (a_n + 1) l and theta(l) = b_n l.
inline std::vector<detail::Tooth> general_comb_teeth(const AffineFamily& family, int L) {
  family.validate();
  std::vector<detail::Tooth> teeth;
  const auto m = family.pieces.size();
  for (int l = 1; l <= L; ++l) {
    int n = 0;
    for (int v = l; v % 2 == 0; v /= 2) ++n;
    const auto& pc = family.pieces[static_cast<std::size_t>(n) % m];
    const double omega = (pc.slope + 1.0) * l;
    if (omega > static_cast<double>(L)) continue;
    double height = std::exp2(-pc.intercept * l);
    if (family.l2_damping) height /= static_cast<double>(l) * static_cast<double>(l);
    teeth.push_back({l, std::exp2(-static_cast<double>(l)), std::exp2(-omega), height});
  }
  return teeth;
}

inline unsigned general_comb_piece(int l, std::size_t pieces) {
  int n = 0;
  for (int v = l; v % 2 == 0; v /= 2) ++n;
  return static_cast<unsigned>(static_cast<std::size_t>(n) % pieces);
}

inline Signal gen_cusp(double alpha, double x0, int L) {
  if (detail::is_even_natural(alpha)) throw InvalidArgument("cusp exponent must not be an even integer");
  if (!(alpha > -1.0)) throw InvalidArgument("cusp exponent must be > -1");
  detail::check_x0(x0);
  Signal sig;
  sig.samples.resize(detail::checked_size(L));
  sig.L = L;
  sig.x0 = x0;
  for (std::size_t i = 0; i < sig.samples.size(); ++i) {
    sig.samples[i] = std::pow(std::abs(sig.x(i) - x0), alpha);
  }
  sig.meta.generator = "cusp";
  sig.meta.params = {{"alpha", alpha}};
  return sig;
}

inline Signal gen_chirp(double alpha, double beta, double x0, int L) {
  if (!(beta > 0.0)) throw InvalidArgument("chirp beta must be > 0");
  if (!(alpha > -1.0)) throw InvalidArgument("chirp alpha must be > -1");
  detail::check_x0(x0);
  Signal sig;
  sig.samples.resize(detail::checked_size(L));
  sig.L = L;
  sig.x0 = x0;
  for (std::size_t i = 0; i < sig.samples.size(); ++i) {
    const double r = std::abs(sig.x(i) - x0);
    sig.samples[i] = std::pow(r, alpha) * std::sin(std::pow(r, -beta));
  }
  sig.meta.generator = "chirp";
  sig.meta.params = {{"alpha", alpha}, {"beta", beta}};
  sig.meta.min_fit_level = detail::resonance_level(beta, L);
  return sig;
}

inline Signal gen_lacunary_comb(const CombSpec& spec, int L) {
  const auto teeth = comb_teeth(spec, L);
  Signal sig;
  sig.samples.assign(detail::checked_size(L), 0.0);
  sig.L = L;
  sig.x0 = 0.0;
  detail::paint_teeth(sig.samples, teeth);
  sig.meta.generator = "comb";
  sig.meta.params = {{"alpha", spec.alpha}, {"gamma", spec.gamma}};
  sig.meta.l_max = teeth.empty() ? 0 : teeth.back().l;
  sig.meta.resolution_warning =
      !teeth.empty() && teeth.back().width < 8.0 / static_cast<double>(sig.size());
  sig.meta.min_fit_level = std::max(1, L - sig.meta.l_max);
  return sig;
}

inline Signal gen_general_comb(const AffineFamily& family, int L) {
  const auto teeth = general_comb_teeth(family, L);
  Signal sig;
  sig.samples.assign(detail::checked_size(L), 0.0);
  sig.L = L;
  sig.x0 = 0.0;
  detail::paint_teeth(sig.samples, teeth);
  sig.meta.generator = "general_comb";
  sig.meta.params = {{"p0", family.p0}, {"l2_damping", family.l2_damping ? 1.0 : 0.0}};
  sig.meta.pieces = family.pieces;
  double narrowest = kInf;
  // The fit must stop where the first piece runs out of resolved teeth.
  std::vector<int> last_tooth(family.pieces.size(), 0);
  for (const auto& t : teeth) {
    sig.meta.l_max = std::max(sig.meta.l_max, t.l);
    narrowest = std::min(narrowest, t.width);
    auto& last = last_tooth[general_comb_piece(t.l, family.pieces.size())];
    last = std::max(last, t.l);
  }
  int shortest = L;
  for (int v : last_tooth) {
    if (v > 0) shortest = std::min(shortest, v);
  }
  sig.meta.resolution_warning = narrowest < 8.0 / static_cast<double>(sig.size());
  sig.meta.min_fit_level = std::max(1, L - shortest);
  return sig;
}

inline Signal gen_selfsimilar(const SelfSimilarSpec& spec, double x0, int L) {
  spec.validate();
  detail::check_x0(x0);
  Signal sig;
  sig.samples.resize(detail::checked_size(L));
  sig.L = L;
  sig.x0 = x0;
  for (std::size_t i = 0; i < sig.samples.size(); ++i) {
    const double d = sig.x(i) - x0;
    const double r = std::abs(d);
    const auto& omega = d > 0.0 ? spec.omega_plus : spec.omega_minus;
    sig.samples[i] = std::pow(r, spec.alpha) * SelfSimilarSpec::eval(omega, std::log(r), spec.ratio);
  }
  sig.meta.generator = "selfsimilar";
  sig.meta.params = {{"alpha", spec.alpha}, {"ratio", spec.ratio}};
  return sig;
}

/// |x-x0|^gamma + |x-x0|^alpha sin(|x-x0|^-beta) with alpha < gamma < alpha/(1+beta) < 0.
inline Signal gen_cusp_plus_chirp(double gamma, double alpha, double beta, double x0, int L) {
  if (!(beta > 0.0)) throw InvalidArgument("cusp+chirp beta must be > 0");
  if (!(alpha < gamma && gamma < alpha / (1.0 + beta) && alpha / (1.0 + beta) < 0.0)) {
    throw InvalidArgument("cusp+chirp requires alpha < gamma < alpha/(1+beta) < 0");
  }
  if (!(alpha > -1.0)) throw InvalidArgument("cusp+chirp alpha must be > -1");
  detail::check_x0(x0);
  Signal sig;
  sig.samples.resize(detail::checked_size(L));
  sig.L = L;
  sig.x0 = x0;
  for (std::size_t i = 0; i < sig.samples.size(); ++i) {
    const double r = std::abs(sig.x(i) - x0);
    sig.samples[i] = std::pow(r, gamma) + std::pow(r, alpha) * std::sin(std::pow(r, -beta));
  }
  sig.meta.generator = "cusp_plus_chirp";
  sig.meta.min_fit_level = detail::resonance_level(beta, L);
  sig.meta.params = {{"gamma", gamma}, {"alpha", alpha}, {"beta", beta}};
  return sig;
}

/// IID N(0,1) samples; Box-Muller over a counter-based uniform stream.
inline Signal gen_wgn(int L, std::uint64_t seed) {
  Signal sig;
  sig.samples.resize(detail::checked_size(L));
  sig.L = L;
  sig.x0 = 0.5;
  constexpr double two_pi = 2.0 * std::numbers::pi;
  for (std::size_t i = 0; i < sig.samples.size(); i += 2) {
    const double u1 = detail::counter_uniform(seed, i);
    const double u2 = detail::counter_uniform(seed, i + 1);
    const double rad = std::sqrt(-2.0 * std::log(u1));
    sig.samples[i] = rad * std::cos(two_pi * u2);
    sig.samples[i + 1] = rad * std::sin(two_pi * u2);
  }
  sig.meta.generator = "wgn";
  sig.meta.params = {{"seed", static_cast<double>(seed)}};
  return sig;
}

inline TheoreticalProfile theoretical_profile(const SignalMeta& meta) {
  TheoreticalProfile tp;
  const auto& g = meta.generator;
  if (g == "cusp") {
    tp.kind = ProfileKind::cusp;
    tp.alpha = meta.param("alpha");
    tp.p0 = detail::p0_from_exponent(tp.alpha);
  } else if (g == "chirp") {
    tp.kind = ProfileKind::chirp;
    tp.alpha = meta.param("alpha");
    tp.beta_osc = meta.param("beta");
    tp.p0 = detail::p0_from_exponent(tp.alpha);
  } else if (g == "comb") {
    tp.kind = ProfileKind::comb;
    tp.alpha = meta.param("alpha");
    tp.gamma = meta.param("gamma");
    tp.p0 = tp.alpha >= 0.0 ? kInf : -tp.gamma / tp.alpha;
  } else if (g == "general_comb") {
    tp.kind = ProfileKind::general_comb;
    tp.pieces = meta.pieces;
    if (tp.pieces.empty()) throw InvalidArgument("general comb meta carries no pieces");
    tp.p0 = meta.param("p0");
  } else if (g == "selfsimilar") {
    tp.kind = ProfileKind::selfsimilar;
    tp.alpha = meta.param("alpha");
    tp.p0 = detail::p0_from_exponent(tp.alpha);
  } else if (g == "cusp_plus_chirp") {
    tp.kind = ProfileKind::cusp_plus_chirp;
    tp.alpha = meta.param("alpha");
    tp.gamma = meta.param("gamma");
    tp.beta_osc = meta.param("beta");
    tp.p0 = detail::p0_from_exponent(tp.alpha);
  } else if (g == "wgn") {
    tp.kind = ProfileKind::white_noise;
    tp.p0 = 0.0;
  } else {
    throw InvalidArgument("unknown generator kind '" + g + "'");
  }
  return tp;
}

}  // namespace pexp

#pragma once

// p-leaders, sup-leaders and (p,s)-leaders on the dyadic tree of a 1-D DWT.
//
// l^(p)(j,k)^p = sum over j' <= j and cubes lambda' inside 3*lambda_{j,k} of
// |c_{j',k'}|^p 2^{-(j-j')}. Computed bottom-up through the per-cube partial
// sums A_j[k] = |c_{j,k}|^p + (A_{j-1}[2k] + A_{j-1}[2k+1]) / 2, then
// l^p = A_j[k-1] + A_j[k] + A_j[k+1].

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pexp/errors.hpp"
#include "pexp/wavelet.hpp"

namespace pexp {

enum LeaderFlag : std::uint8_t {
  kClipped = 1,  // 3-cube window cut by the domain edge
  kWrapped = 2,  // window holds a coefficient whose support wraps the domain
};

struct LeaderField {
  double p = 1.0;  // +inf for sup-leaders
  double s = 0.0;
  int L = 0;
  int J = 0;
  /// Finest level entering the sums (the data resolution).
  int truncation_level = 1;
  std::string wavelet;
  std::vector<std::vector<double>> values;       // values[j-1][k]
  std::vector<std::vector<std::uint8_t>> flags;  // LeaderFlag bits

  const std::vector<double>& level(int j) const { return values.at(static_cast<std::size_t>(j - 1)); }
  const std::vector<std::uint8_t>& flag(int j) const { return flags.at(static_cast<std::size_t>(j - 1)); }
  double log2_scale(int j) const noexcept { return static_cast<double>(j - L); }
};

namespace detail {

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double v) noexcept {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double value() const noexcept { return sum + comp; }
};

inline std::vector<std::vector<std::uint8_t>> leader_flags(const WaveletCoeffs& coeffs) {
  std::vector<std::vector<std::uint8_t>> flags(static_cast<std::size_t>(coeffs.J));
  std::vector<std::uint8_t> wrapped_below;
  for (int j = 1; j <= coeffs.J; ++j) {
    const std::size_t n = coeffs.count(j);
    const auto& mask = coeffs.mask(j);
    std::vector<std::uint8_t> wrapped(n);
    for (std::size_t k = 0; k < n; ++k) {
      std::uint8_t w = mask[k];
      if (j > 1) w |= wrapped_below[2 * k] | wrapped_below[2 * k + 1];
      wrapped[k] = w;
    }
    auto& f = flags[static_cast<std::size_t>(j - 1)];
    f.assign(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
      std::uint8_t bits = 0;
      if (k == 0 || k + 1 == n) bits |= kClipped;
      const bool w = wrapped[k] || (k > 0 && wrapped[k - 1]) || (k + 1 < n && wrapped[k + 1]);
      if (w) bits |= kWrapped;
      f[k] = bits;
    }
    wrapped_below.swap(wrapped);
  }
  return flags;
}

inline LeaderField empty_field(const WaveletCoeffs& coeffs, double p, double s) {
  LeaderField f;
  f.p = p;
  f.s = s;
  f.L = coeffs.L;
  f.J = coeffs.J;
  f.wavelet = coeffs.wavelet.name();
  f.values.resize(static_cast<std::size_t>(coeffs.J));
  f.flags = leader_flags(coeffs);
  return f;
}

}  // namespace detail

/// (p,s)-leaders: coefficients are scaled by a_{j'}^s = 2^{s (j' - L)} before
/// aggregation. s = 0 gives plain p-leaders bit for bit.
inline LeaderField compute_ps_leaders(const WaveletCoeffs& coeffs, double p, double s) {
  if (!(p > 0.0) || std::isinf(p)) throw InvalidArgument("p-leaders need a finite p > 0");
  if (!(s >= 0.0)) throw InvalidArgument("fractional order s must be >= 0");
  LeaderField field = detail::empty_field(coeffs, p, s);

  std::vector<detail::CompensatedSum> below;
  std::vector<detail::CompensatedSum> cur;
  for (int j = 1; j <= coeffs.J; ++j) {
    const std::size_t n = coeffs.count(j);
    const auto& c = coeffs.level(j);
    const double scale = (s == 0.0) ? 1.0 : std::exp2(s * coeffs.log2_scale(j));
    cur.assign(n, {});
    for (std::size_t k = 0; k < n; ++k) {
      auto& acc = cur[k];
      if (j > 1) {
        acc.add(0.5 * below[2 * k].sum);
        acc.add(0.5 * below[2 * k + 1].sum);
        acc.add(0.5 * (below[2 * k].comp + below[2 * k + 1].comp));
      }
      acc.add(std::pow(std::abs(scale * c[k]), p));
    }
    auto& out = field.values[static_cast<std::size_t>(j - 1)];
    out.resize(n);
    const double inv_p = 1.0 / p;
    for (std::size_t k = 0; k < n; ++k) {
      detail::CompensatedSum win;
      if (k > 0) win.add(cur[k - 1].value());
      win.add(cur[k].value());
      if (k + 1 < n) win.add(cur[k + 1].value());
      out[k] = std::pow(win.value(), inv_p);
    }
    below.swap(cur);
  }
  return field;
}

inline LeaderField compute_pleaders(const WaveletCoeffs& coeffs, double p) {
  if (!(p > 0.0)) throw InvalidArgument("p must be > 0");
  return compute_ps_leaders(coeffs, p, 0.0);
}

/// Sup-leaders (p = infinity), optionally on coefficients scaled by a_{j'}^s.
inline LeaderField compute_leaders_inf(const WaveletCoeffs& coeffs, double s = 0.0) {
  if (!(s >= 0.0)) throw InvalidArgument("fractional order s must be >= 0");
  LeaderField field = detail::empty_field(coeffs, std::numeric_limits<double>::infinity(), s);
  std::vector<double> below;
  std::vector<double> cur;
  for (int j = 1; j <= coeffs.J; ++j) {
    const std::size_t n = coeffs.count(j);
    const auto& c = coeffs.level(j);
    const double scale = (s == 0.0) ? 1.0 : std::exp2(s * coeffs.log2_scale(j));
    cur.assign(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
      double m = std::abs(scale * c[k]);
      if (j > 1) m = std::max({m, below[2 * k], below[2 * k + 1]});
      cur[k] = m;
    }
    auto& out = field.values[static_cast<std::size_t>(j - 1)];
    out.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      double m = cur[k];
      if (k > 0) m = std::max(m, cur[k - 1]);
      if (k + 1 < n) m = std::max(m, cur[k + 1]);
      out[k] = m;
    }
    below.swap(cur);
  }
  return field;
}

/// Dispatches on p: finite p gives (p,s)-leaders, p = inf gives sup-leaders.
inline LeaderField compute_leaders(const WaveletCoeffs& coeffs, double p, double s = 0.0) {
  return std::isinf(p) ? compute_leaders_inf(coeffs, s) : compute_ps_leaders(coeffs, p, s);
}

}  // namespace pexp

#pragma once

// Periodic orthonormal Daubechies pyramid with L1-normalised detail
// coefficients.
//
// Level j = 1 is the finest. Coefficient (j, k) is attached to the dyadic cube
// of 2^j samples starting at sample 2^j k; the filters are shifted so that the
// support of the equivalent level-j wavelet is centred on that cube.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pexp/errors.hpp"
#include "pexp/signal.hpp"

namespace pexp {

struct WaveletSpec {
  int n_vanishing = 3;
  std::vector<double> lowpass;
  std::vector<double> highpass;

  /// Daubechies minimum-phase filters with 1..10 vanishing moments.
  static WaveletSpec daubechies(int n_vanishing);

  std::size_t length() const noexcept { return lowpass.size(); }
  /// Index shift that centres each coefficient on its dyadic cube.
  std::ptrdiff_t shift() const noexcept { return static_cast<std::ptrdiff_t>(length() / 2) - 1; }
  std::string name() const { return "db" + std::to_string(n_vanishing); }
};

namespace detail {
// clang-format off
inline constexpr double db1[] = {
      0.7071067811865475244, 0.7071067811865475244};
inline constexpr double db2[] = {
      0.48296291314453414337, 0.83651630373780790558,
      0.22414386804201338103, -0.12940952255126038117};
inline constexpr double db3[] = {
      0.332670552950082616, 0.80689150931109257649,
      0.4598775021184915701, -0.1350110200102545887,
      -0.085441273882026661693, 0.035226291885709536603};
inline constexpr double db4[] = {
      0.23037781330889650086, 0.71484657055291564709,
      0.63088076792985890788, -0.027983769416859854211,
      -0.18703481171909308408, 0.030841381835560763627,
      0.032883011666885199735, -0.010597401785069032105};
inline constexpr double db5[] = {
      0.16010239797419291448, 0.60382926979718967054,
      0.72430852843777292773, 0.13842814590132073151,
      -0.24229488706638203186, -0.032244869584638374648,
      0.077571493840045713523, -0.0062414902127982742742,
      -0.012580751999081999469, 0.003335725285473771278};
inline constexpr double db6[] = {
      0.11154074335010946362, 0.49462389039845308568,
      0.75113390802109535068, 0.31525035170919762909,
      -0.22626469396543982008, -0.12976686756726193556,
      0.097501605587323049102, 0.027522865530305728626,
      -0.031582039317486029565, 0.00055384220116149613925,
      0.0047772575109455106396, -0.0010773010853084795649};
inline constexpr double db7[] = {
      0.07785205408500917902, 0.39653931948191730654,
      0.72913209084623511992, 0.46978228740519312247,
      -0.14390600392856497541, -0.22403618499387498264,
      0.071309219266830264751, 0.080612609151083071913,
      -0.03802993693501441358, -0.016574541630666880654,
      0.012550998556099840613, 0.00042957797292136652113,
      -0.0018016407040474909153, 0.00035371379997452024845};
inline constexpr double db8[] = {
      0.054415842243104009955, 0.31287159091429997066,
      0.67563073629728980681, 0.58535468365420671277,
      -0.015829105256349305667, -0.28401554296154692652,
      0.00047248457391328277036, 0.12874742662047845886,
      -0.01736930100180754617, -0.044088253930794751507,
      0.013981027917398281649, 0.0087460940474057767164,
      -0.0048703529934515743104, -0.0003917403733769470463,
      0.00067544940645056936637, -0.00011747678412476953373};
inline constexpr double db9[] = {
      0.038077947363878346589, 0.24383467461259035373,
      0.6048231236901111119, 0.65728807805130053808,
      0.13319738582500757619, -0.29327378327917490881,
      -0.096840783222976460514, 0.14854074933810638014,
      0.030725681479333379212, -0.067632829061329973676,
      0.00025094711483145195759, 0.022361662123679097205,
      -0.0047232047577513972779, -0.0042815036824634298345,
      0.0018476468830562264766, 0.00023038576352319596721,
      -0.00025196318894271013697, 0.000039347320316271599481};
inline constexpr double db10[] = {
      0.026670057900555553587, 0.18817680007769148902,
      0.52720118893172558648, 0.68845903945360356574,
      0.28117234366057746075, -0.24984642432731537942,
      -0.1959462743773770435, 0.12736934033579326008,
      0.09305736460357235116, -0.071394147166397087145,
      -0.029457536821875812858, 0.03321267405934100174,
      0.0036065535669561696554, -0.010733175483330575044,
      0.0013953517470529011658, 0.0019924052951850561172,
      -0.00068585669495971162656, -0.00011646685512928545095,
      0.000093588670320069591334, -0.000013264202894521244812};
// clang-format on
}  // namespace detail

inline WaveletSpec WaveletSpec::daubechies(int n_vanishing) {
  std::span<const double> taps;
  switch (n_vanishing) {
    case 1: taps = detail::db1; break;
    case 2: taps = detail::db2; break;
    case 3: taps = detail::db3; break;
    case 4: taps = detail::db4; break;
    case 5: taps = detail::db5; break;
    case 6: taps = detail::db6; break;
    case 7: taps = detail::db7; break;
    case 8: taps = detail::db8; break;
    case 9: taps = detail::db9; break;
    case 10: taps = detail::db10; break;
    default:
      throw InvalidArgument("Daubechies order must lie in [1, 10], got " +
                            std::to_string(n_vanishing));
  }
  WaveletSpec w;
  w.n_vanishing = n_vanishing;
  w.lowpass.assign(taps.begin(), taps.end());
  const std::size_t len = taps.size();
  w.highpass.resize(len);
  for (std::size_t n = 0; n < len; ++n) {
    const double sign = (n % 2 == 0) ? 1.0 : -1.0;
    w.highpass[n] = sign * taps[len - 1 - n];
  }
  return w;
}

/// Inclusive level interval [j1, j2] used by regressions.
struct FitRange {
  int j1 = 0;
  int j2 = 0;
  int count() const noexcept { return j2 - j1 + 1; }
};

struct WaveletCoeffs {
  WaveletSpec wavelet;
  std::size_t N = 0;
  int L = 0;
  int J = 0;
  /// detail[j-1][k] = L1-normalised c_{j,k}, N / 2^j entries.
  std::vector<std::vector<double>> detail;
  /// boundary[j-1][k] = 1 when the wavelet support wraps the domain edge.
  std::vector<std::vector<std::uint8_t>> boundary;
  /// Level-J approximation in orthonormal pyramid units.
  std::vector<double> approx;

  const std::vector<double>& level(int j) const { return detail.at(static_cast<std::size_t>(j - 1)); }
  const std::vector<std::uint8_t>& mask(int j) const {
    return boundary.at(static_cast<std::size_t>(j - 1));
  }
  std::size_t count(int j) const noexcept { return N >> j; }
  /// log2 of the physical scale a_j = 2^{j - L}.
  double log2_scale(int j) const noexcept { return static_cast<double>(j - L); }
};

namespace detail {

inline std::size_t wrap(std::ptrdiff_t i, std::size_t m) noexcept {
  const auto mm = static_cast<std::ptrdiff_t>(m);
  i %= mm;
  if (i < 0) i += mm;
  return static_cast<std::size_t>(i);
}

}  // namespace detail

/// Deepest usable level for a given signal length and filter.
inline int max_level(std::size_t n, const WaveletSpec& w) {
  const int l = log2_exact(n);
  int j = 0;
  while (j < l - 2 && (n >> j) >= w.length()) ++j;
  return j;
}

inline WaveletCoeffs forward_dwt(std::span<const double> samples, const WaveletSpec& wavelet, int J) {
  const int l = log2_exact(samples.size());
  if (J < 1) throw InvalidArgument("decomposition depth must be >= 1");
  if (J > l - 2) {
    throw InvalidArgument("decomposition depth " + std::to_string(J) + " exceeds L - 2 = " +
                          std::to_string(l - 2));
  }
  const std::size_t len = wavelet.length();
  if ((samples.size() >> (J - 1)) < len) {
    throw InvalidArgument("signal too short for filter length at level " + std::to_string(J));
  }

  WaveletCoeffs out;
  out.wavelet = wavelet;
  out.N = samples.size();
  out.L = l;
  out.J = J;
  out.detail.resize(static_cast<std::size_t>(J));
  out.boundary.resize(static_cast<std::size_t>(J));

  const auto shift = wavelet.shift();
  std::vector<double> a(samples.begin(), samples.end());
  std::vector<double> next;
  for (int j = 1; j <= J; ++j) {
    const std::size_t m = a.size();
    const std::size_t half = m / 2;
    next.assign(half, 0.0);
    auto& d = out.detail[static_cast<std::size_t>(j - 1)];
    d.assign(half, 0.0);
    const double l1 = std::exp2(-0.5 * j);
    for (std::size_t k = 0; k < half; ++k) {
      double lo = 0.0;
      double hi = 0.0;
      const auto base = static_cast<std::ptrdiff_t>(2 * k) - shift;
      for (std::size_t n = 0; n < len; ++n) {
        const double v = a[detail::wrap(base + static_cast<std::ptrdiff_t>(n), m)];
        lo += wavelet.lowpass[n] * v;
        hi += wavelet.highpass[n] * v;
      }
      next[k] = lo;
      d[k] = l1 * hi;
    }
    a.swap(next);

    auto& mask = out.boundary[static_cast<std::size_t>(j - 1)];
    mask.assign(half, 0);
    const auto span = static_cast<std::ptrdiff_t>((std::size_t{1} << j) - 1);
    const auto last = static_cast<std::ptrdiff_t>(out.N) - 1;
    for (std::size_t k = 0; k < half; ++k) {
      const auto start = static_cast<std::ptrdiff_t>(k << j) - shift * span;
      const auto end = start + static_cast<std::ptrdiff_t>(len - 1) * span;
      mask[k] = (start < 0 || end > last) ? 1 : 0;
    }
  }
  out.approx = std::move(a);
  return out;
}

inline WaveletCoeffs forward_dwt(const Signal& sig, const WaveletSpec& wavelet, int J) {
  return forward_dwt(std::span<const double>(sig.samples), wavelet, J);
}

/// Reconstructs samples from L1-normalised details and a level-J approximation.
inline std::vector<double> inverse_dwt(const WaveletCoeffs& coeffs, std::span<const double> approx) {
  if (coeffs.J < 1 || coeffs.detail.size() != static_cast<std::size_t>(coeffs.J)) {
    throw InvalidArgument("coefficient set has inconsistent depth");
  }
  if (approx.size() != (coeffs.N >> coeffs.J)) {
    throw InvalidArgument("approximation length does not match decomposition depth");
  }
  const auto& w = coeffs.wavelet;
  const std::size_t len = w.length();
  const auto shift = w.shift();
  std::vector<double> a(approx.begin(), approx.end());
  std::vector<double> up;
  for (int j = coeffs.J; j >= 1; --j) {
    const auto& d = coeffs.level(j);
    if (d.size() != a.size()) throw InvalidArgument("detail level size mismatch");
    const std::size_t m = 2 * a.size();
    up.assign(m, 0.0);
    const double l2 = std::exp2(0.5 * j);
    for (std::size_t k = 0; k < a.size(); ++k) {
      const auto base = static_cast<std::ptrdiff_t>(2 * k) - shift;
      const double ak = a[k];
      const double dk = l2 * d[k];
      for (std::size_t n = 0; n < len; ++n) {
        up[detail::wrap(base + static_cast<std::ptrdiff_t>(n), m)] +=
            w.lowpass[n] * ak + w.highpass[n] * dk;
      }
    }
    a.swap(up);
  }
  return a;
}

inline std::vector<double> inverse_dwt(const WaveletCoeffs& coeffs) {
  return inverse_dwt(coeffs, std::span<const double>(coeffs.approx));
}

/// Estimates close to the number of vanishing moments are unreliable.
inline bool near_wavelet_limit(double h, const WaveletSpec& w) noexcept {
  return std::isfinite(h) && h > static_cast<double>(w.n_vanishing) - 0.5;
}

}  // namespace pexp

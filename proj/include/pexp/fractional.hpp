#pragma once

// Fourier-domain fractional integration (Id - Laplacian)^{-s/2} on the unit
// periodic domain, backed by FFTW.

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

#include "pexp/errors.hpp"
#include "pexp/signal.hpp"

namespace pexp {

namespace detail {

// FFTW's planner is not thread safe.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwPlanDeleter {
  void operator()(fftw_plan_s* p) const {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(p);
  }
};
using FftwPlan = std::unique_ptr<fftw_plan_s, FftwPlanDeleter>;

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace detail

/// Multiplier applied to the k-th signed Fourier bin, xi = 2 pi k.
inline double fractional_multiplier(double k, double s) {
  const double xi = 2.0 * std::numbers::pi * k;
  return std::pow(1.0 + xi * xi, -0.5 * s);
}

inline Signal fractional_integrate_fourier(const Signal& sig, double s) {
  if (!(s >= 0.0)) throw InvalidArgument("fractional integration order must be >= 0");
  Signal out = sig;
  if (s == 0.0) return out;

  const std::size_t n = sig.size();
  if (n < 2) throw InvalidArgument("signal too short for fractional integration");
  const std::size_t bins = n / 2 + 1;
  std::unique_ptr<double, detail::FftwFree> buf(fftw_alloc_real(n));
  std::unique_ptr<fftw_complex, detail::FftwFree> spec(fftw_alloc_complex(bins));
  detail::FftwPlan fwd;
  detail::FftwPlan inv;
  {
    std::lock_guard lock(detail::fftw_planner_mutex());
    fwd.reset(fftw_plan_dft_r2c_1d(static_cast<int>(n), buf.get(), spec.get(), FFTW_ESTIMATE));
    inv.reset(fftw_plan_dft_c2r_1d(static_cast<int>(n), spec.get(), buf.get(), FFTW_ESTIMATE));
  }
  if (!fwd || !inv) throw std::runtime_error("FFTW planning failed");

  std::copy(sig.samples.begin(), sig.samples.end(), buf.get());
  fftw_execute(fwd.get());
  const double norm = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k < bins; ++k) {
    const double m = fractional_multiplier(static_cast<double>(k), s) * norm;
    spec.get()[k][0] *= m;
    spec.get()[k][1] *= m;
  }
  fftw_execute(inv.get());
  std::copy(buf.get(), buf.get() + n, out.samples.begin());
  out.meta.params["fractional_order"] = s;
  return out;
}

}  // namespace pexp

#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pexp/errors.hpp"

namespace pexp {

/// Ordinary least-squares line through (log2 scale, log2 value) points.
struct RegressionFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  double r2 = 0.0;
  int j1 = 0;
  int j2 = 0;
  std::vector<std::pair<double, double>> points;
  /// Scales dropped because the value was zero, non-finite or flagged.
  int n_excluded = 0;
};

inline constexpr std::size_t kMinFitPoints = 4;

/// Fits y = slope * x + intercept. Non-finite points are dropped and counted.
inline RegressionFit ols_fit(const std::vector<std::pair<double, double>>& pts, int j1, int j2,
                             int already_excluded = 0) {
  RegressionFit fit;
  fit.j1 = j1;
  fit.j2 = j2;
  fit.n_excluded = already_excluded;
  for (const auto& pt : pts) {
    if (std::isfinite(pt.first) && std::isfinite(pt.second)) {
      fit.points.push_back(pt);
    } else {
      ++fit.n_excluded;
    }
  }
  const std::size_t n = fit.points.size();
  if (n < kMinFitPoints) {
    throw EstimationError("regression needs at least 4 usable scales, got " + std::to_string(n));
  }
  double mx = 0.0;
  double my = 0.0;
  for (const auto& [x, y] : fit.points) {
    mx += x;
    my += y;
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (const auto& [x, y] : fit.points) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (y - my);
    syy += (y - my) * (y - my);
  }
  if (sxx <= 0.0) throw EstimationError("regression abscissae are degenerate");
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  double ssr = 0.0;
  for (const auto& [x, y] : fit.points) {
    const double r = y - (fit.intercept + fit.slope * x);
    ssr += r * r;
  }
  fit.stderr_slope = std::sqrt(ssr / static_cast<double>(n - 2) / sxx);
  fit.r2 = syy > 0.0 ? 1.0 - ssr / syy : 1.0;
  return fit;
}

}  // namespace pexp

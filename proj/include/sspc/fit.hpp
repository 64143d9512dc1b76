#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include "sspc/errors.hpp"

namespace sspc {

/// y ~ constant * x^exponent fitted by least squares on log-log data.
struct ScalingFit {
  double exponent = 0.0;
  double constant = 0.0;
  double r_squared = 0.0;
  std::array<double, 2> window{0.0, 0.0};
  std::size_t points = 0;
};

/// Ordinary least squares of log y on log x using the points with x in [window[0], window[1]].
inline ScalingFit fit_power_law(const std::vector<double>& xs, const std::vector<double>& ys,
                                std::array<double, 2> window) {
  if (xs.size() != ys.size()) throw ArgumentError("fit_power_law: xs and ys differ in length");
  if (!(window[0] <= window[1])) throw ArgumentError("fit_power_law: empty window");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] < window[0] || xs[i] > window[1]) continue;
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0) || !std::isfinite(xs[i]) || !std::isfinite(ys[i]))
      throw ArgumentError("fit_power_law: non-positive or non-finite data in window");
    lx.push_back(std::log(xs[i]));
    ly.push_back(std::log(ys[i]));
  }
  const std::size_t n = lx.size();
  if (n < 4) throw ArgumentError("fit_power_law: fewer than 4 points in window");
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) mx += lx[i], my += ly[i];
  mx /= n, my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (sxx == 0.0) throw ArgumentError("fit_power_law: all x coincide in window");
  ScalingFit f;
  f.exponent = sxy / sxx;
  f.constant = std::exp(my - f.exponent * mx);
  f.r_squared = syy == 0.0 ? 1.0 : std::min(1.0, std::max(0.0, sxy * sxy / (sxx * syy)));
  f.window = window;
  f.points = n;
  return f;
}

}  // namespace sspc

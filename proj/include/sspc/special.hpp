#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "sspc/errors.hpp"
#include "sspc/io.hpp"

namespace sspc {

/// Critical point of f_s(t) = st - t^{k+1} on (0, inf) and the value and curvature there.
struct SaddleData {
  double t_star = 0.0;
  double f_star = 0.0;
  double f_second = 0.0;
};

namespace detail {

inline void check_power(int k) {
  if (k != 1 && (k < 2 || k % 2 != 0)) throw ArgumentError("k must be 1 or an even integer >= 2");
}

}  // namespace detail

inline SaddleData saddle_data(int k, double s) {
  detail::check_power(k);
  if (!(s > 0.0) || !std::isfinite(s)) throw ArgumentError("saddle_data: s must be positive");
  const double kk = k;
  SaddleData d;
  d.t_star = std::pow(s / (kk + 1.0), 1.0 / kk);
  d.f_star = kk / std::pow(kk + 1.0, (kk + 1.0) / kk) * std::pow(s, (kk + 1.0) / kk);
  d.f_second = -kk * std::pow(kk + 1.0, 1.0 / kk) * std::pow(s, (kk - 1.0) / kk);
  return d;
}

/// I(s) and its logarithm with the relative quadrature error estimate.
struct IntegralValue {
  double log_value = 0.0;
  double value = 0.0;      // exp(log_value); inf when it overflows
  double error = 0.0;      // relative error estimate
  double upper_limit = 0.0;
};

/// I(s) = int_0^inf e^{st - t^{k+1}} dt by adaptive Gauss-Kronrod on [0, T].
///
/// The integrand is scaled by e^{-f_star} for s > 0, so the logarithm is available far beyond
/// the range where I itself is representable.
inline IntegralValue integral_I(int k, double s, double tol = 1e-12) {
  detail::check_power(k);
  if (!std::isfinite(s)) throw ArgumentError("integral_I: s must be finite");
  if (!(tol > 0.0)) throw ArgumentError("integral_I: tolerance must be positive");
  const double kk = k;
  double shift = 0.0, T, split = 0.0;
  if (s > 0.0) {
    const auto d = saddle_data(k, s);
    shift = d.f_star;
    split = d.t_star;
    T = d.t_star + std::max(10.0, 10.0 / std::sqrt(-d.f_second));
  } else {
    T = std::max(5.0, std::pow(40.0, 1.0 / (kk + 1.0)));
  }
  auto f = [&](double t) { return std::exp(s * t - std::pow(t, kk + 1.0) - shift); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  double e1 = 0.0, e2 = 0.0, v;
  if (split > 0.0) {
    v = GK::integrate(f, 0.0, split, 20, tol, &e1) + GK::integrate(f, split, T, 20, tol, &e2);
  } else if (s < -1.0) {
    // boundary layer of width 1/|s| at t = 0
    const double b = std::min(T, 40.0 / -s);
    v = GK::integrate(f, 0.0, b, 20, tol, &e1) + (b < T ? GK::integrate(f, b, T, 20, tol, &e2) : 0.0);
  } else {
    v = GK::integrate(f, 0.0, T, 20, tol, &e1);
  }
  if (!(v > 0.0) || !std::isfinite(v)) throw EvaluationError("integral_I: quadrature failed at s = " + io::fmt(s));
  IntegralValue out;
  out.log_value = std::log(v) + shift;
  out.value = std::exp(out.log_value);
  out.error = (e1 + e2) / v;
  out.upper_limit = T;
  return out;
}

/// I(s) for |s| <= 50; beyond that use log_I_of_s.
inline double I_of_s(int k, double s) {
  if (!(std::abs(s) <= 50.0)) throw ArgumentError("I_of_s: |s| <= 50 required; use log_I_of_s beyond");
  return integral_I(k, s).value;
}

inline double log_I_of_s(int k, double s) { return integral_I(k, s).log_value; }

/// (1/h) int_0^inf exp((t a - t^{k+1}/C)/h) dt = C^{1/(k+1)} h^{-k/(k+1)} I(C^{1/(k+1)} h^{-k/(k+1)} a).
inline double resolvent_envelope(int k, double C, double h, double re_z) {
  if (!(C > 0.0) || !(h > 0.0)) throw ArgumentError("resolvent_envelope: C and h must be positive");
  const double scale = std::pow(C, 1.0 / (k + 1.0)) * std::pow(h, -static_cast<double>(k) / (k + 1.0));
  return scale * std::exp(log_I_of_s(k, scale * re_z));
}

enum class Re2Regime { Central, Negative, Positive };

inline const char* regime_name(Re2Regime r) {
  switch (r) {
    case Re2Regime::Central: return "|s|<=1";
    case Re2Regime::Negative: return "s<=-1";
    case Re2Regime::Positive: return "s>=1";
  }
  return "";
}

inline const char* regime_anchor(Re2Regime r) {
  switch (r) {
    case Re2Regime::Central: return "re.12";
    case Re2Regime::Negative: return "re.13";
    case Re2Regime::Positive: return "re.14";
  }
  return "";
}

/// Bound shape of a regime: 1, 1/|s|, or s^{-(k-1)/(2k)} e^{f_star}.
inline double bound_shape(int k, double s, Re2Regime r) {
  switch (r) {
    case Re2Regime::Central: return 1.0;
    case Re2Regime::Negative: return 1.0 / std::abs(s);
    case Re2Regime::Positive:
      return std::pow(s, -(k - 1.0) / (2.0 * k)) * std::exp(saddle_data(k, s).f_star);
  }
  return 1.0;
}

/// Stationary-phase prediction sqrt(2 pi/|f''|) e^{f_star} for s > 0.
inline double laplace_prediction(int k, double s) {
  const auto d = saddle_data(k, s);
  return std::sqrt(2.0 * std::numbers::pi / -d.f_second) * std::exp(d.f_star);
}

struct RegimeCheck {
  Re2Regime regime = Re2Regime::Central;
  std::vector<double> s;
  std::vector<double> ratio;  // I(s) / bound_shape
  double constant = 0.0;      // max ratio
  bool within_budget = false;
};

struct Re2Row {
  double s, I, bound_shape, ratio;
};

struct Re2Report {
  int k = 2;
  double budget = 10.0;
  std::vector<RegimeCheck> regimes;
  std::vector<Re2Row> rows;            // one per sample, shape of its first matching regime
  std::vector<double> laplace_s;       // s >= 1 samples
  std::vector<double> laplace_ratio;   // I e^{-f_star} / sqrt(2 pi/|f''|)
  std::vector<std::string> violations;

  bool passed() const { return violations.empty(); }
};

/// Implied constants of the three regimes; samples with s = +-1 count in both neighbours.
///
/// A regime fails when its constant exceeds the budget; the two unbounded regimes also fail when
/// the ratio grows toward |s| -> inf (max over the outer half of the samples above twice the inner half).
inline Re2Report check_re2_bounds(int k, std::vector<double> s_samples, double budget = 10.0) {
  detail::check_power(k);
  std::sort(s_samples.begin(), s_samples.end());
  s_samples.erase(std::unique(s_samples.begin(), s_samples.end()), s_samples.end());
  Re2Report rep;
  rep.k = k;
  rep.budget = budget;
  auto in = [](Re2Regime r, double s) {
    switch (r) {
      case Re2Regime::Central: return std::abs(s) <= 1.0;
      case Re2Regime::Negative: return s <= -1.0;
      case Re2Regime::Positive: return s >= 1.0;
    }
    return false;
  };
  for (auto r : {Re2Regime::Central, Re2Regime::Negative, Re2Regime::Positive}) {
    RegimeCheck c;
    c.regime = r;
    for (double s : s_samples)
      if (in(r, s)) c.s.push_back(s);
    if (c.s.empty()) throw ArgumentError(std::string("check_re2_bounds: no samples in regime ") + regime_name(r));
    rep.regimes.push_back(std::move(c));
  }
  for (double s : s_samples) {
    const double I = std::exp(log_I_of_s(k, s));
    bool first = true;
    for (auto& c : rep.regimes) {
      if (!in(c.regime, s)) continue;
      const double shape = bound_shape(k, s, c.regime);
      c.ratio.push_back(I / shape);
      if (first) rep.rows.push_back({s, I, shape, I / shape}), first = false;
    }
    if (s >= 1.0) {
      rep.laplace_s.push_back(s);
      rep.laplace_ratio.push_back(std::exp(log_I_of_s(k, s) - std::log(laplace_prediction(k, s))));
    }
  }
  for (auto& c : rep.regimes) {
    c.constant = *std::max_element(c.ratio.begin(), c.ratio.end());
    c.within_budget = c.constant <= budget;
    if (!c.within_budget)
      rep.violations.push_back(std::string(regime_anchor(c.regime)) + ": implied constant " + io::fmt(c.constant) +
                               " exceeds " + io::fmt(budget));
    const std::size_t n = c.ratio.size();
    if (c.regime != Re2Regime::Central && n >= 4) {
      const auto mid = c.ratio.begin() + static_cast<std::ptrdiff_t>(n / 2);
      const double lower = *std::max_element(c.ratio.begin(), mid), upper = *std::max_element(mid, c.ratio.end());
      // the negative regime runs toward -inf at the front of the sorted samples
      const bool grows = c.regime == Re2Regime::Negative ? lower > 2.0 * upper : upper > 2.0 * lower;
      if (grows) rep.violations.push_back(std::string(regime_anchor(c.regime)) + ": ratio grows with |s|");
    }
  }
  return rep;
}

/// Export: columns k, s, I, bound_shape, ratio.
inline void write_re2_csv(const std::filesystem::path& path, const Re2Report& rep) {
  io::CsvWriter csv(path, {"k", "s", "I", "bound_shape", "ratio"});
  for (const auto& r : rep.rows) csv.row({static_cast<double>(rep.k), r.s, r.I, r.bound_shape, r.ratio});
  csv.close();
}

}  // namespace sspc

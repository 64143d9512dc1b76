#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sspc/errors.hpp"
#include "sspc/phase_space.hpp"
#include "sspc/symbol.hpp"

namespace sspc {

/// Which real part of the symbol generates a Hamiltonian field.
enum class Part { Real, Imag };

/// H_f = (df/dxi, -df/dx) for f = Re p or Im p, stacked like PhasePoint::stacked().
inline std::vector<double> hamiltonian_field(const Symbol& sym, Part part, const PhasePoint& rho) {
  const std::size_t n = sym.dim();
  const auto g = sym.grad(rho);
  std::vector<double> field(2 * n);
  for (std::size_t j = 0; j < n; ++j) {
    const complex dx = g[j], dxi = g[n + j];
    field[j] = part == Part::Real ? dxi.real() : dxi.imag();
    field[n + j] = part == Part::Real ? -dx.real() : -dx.imag();
  }
  return field;
}

/// Classical RK4 trajectory of H_{Re p} or H_{Im p}; returns steps + 1 points.
///
/// Throws TruncationError when a non-periodic coordinate leaves `box`
/// (the symbol's default box when none is given).
inline std::vector<PhasePoint> flow(const Symbol& sym, Part part, const PhasePoint& rho0, double t, int steps,
                                   const std::optional<PhaseBox>& box = std::nullopt) {
  if (steps < 1) throw ArgumentError("flow: steps must be >= 1");
  if (!std::isfinite(t)) throw ArgumentError("flow: t must be finite");
  if (rho0.dim() != sym.dim()) throw ArgumentError("flow: point dimension does not match the symbol");
  const PhaseBox& b = box ? *box : sym.box();
  const double dt = t / steps;
  const std::size_t m = 2 * sym.dim();

  auto rhs = [&](const std::vector<double>& y) { return hamiltonian_field(sym, part, PhasePoint::from_stacked(y)); };

  std::vector<PhasePoint> path;
  path.reserve(static_cast<std::size_t>(steps) + 1);
  path.push_back(rho0);
  std::vector<double> y = rho0.stacked(), tmp(m);
  for (int s = 0; s < steps; ++s) {
    const auto k1 = rhs(y);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * dt * k1[i];
    const auto k2 = rhs(tmp);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * dt * k2[i];
    const auto k3 = rhs(tmp);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + dt * k3[i];
    const auto k4 = rhs(tmp);
    for (std::size_t i = 0; i < m; ++i) y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    auto p = PhasePoint::from_stacked(y);
    if (!p.finite()) throw EvaluationError("flow: non-finite trajectory");
    if (!b.contains(p, sym.periodic_flags()))
      throw TruncationError("flow: trajectory left the phase-space box", (s + 1) * dt);
    path.push_back(std::move(p));
  }
  return path;
}

/// Tolerance below which a negative Re p sample counts as roundoff.
inline constexpr double kNegativityTolerance = 1e-12;

/// J(t, rho) = int_0^t Re p(exp(s H_{Im p}) rho) ds by composite Simpson on the RK4 trajectory.
inline double accumulate_J(const Symbol& sym, const PhasePoint& rho, double t, int steps = 200) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw ArgumentError("accumulate_J: t must be finite and >= 0");
  if (t == 0.0) return 0.0;
  if (steps < 2) steps = 2;
  if (steps % 2) ++steps;
  const auto path = flow(sym, Part::Imag, rho, t, steps);
  const double ds = t / steps;
  double sum = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double f = sym.eval(path[static_cast<std::size_t>(i)]).real();
    if (!std::isfinite(f)) throw EvaluationError("accumulate_J: non-finite Re p on trajectory");
    if (f < -kNegativityTolerance)
      throw AssumptionViolation("accumulate_J: Re p < 0 on the H_{Im p} trajectory (Re p >= 0 required)", "re.2");
    const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    sum += w * f;
  }
  return std::max(0.0, sum * ds / 3.0);
}

/// Outcome of the bracket-order classification at a zero of Re p.
struct BracketClassification {
  int order_k = 0;
  double coefficient = 0.0;          // H_{Im p}^k Re p at rho
  std::vector<double> probe_values;  // derivative estimates for j = 0..k
};

namespace detail {

/// Fornberg weights for the derivative of order `order` at 0 on integer nodes.
inline std::vector<double> fd_weights(int order, const std::vector<double>& nodes) {
  const int n = static_cast<int>(nodes.size()) - 1;
  std::vector<std::vector<double>> c(static_cast<std::size_t>(n + 1), std::vector<double>(order + 1, 0.0));
  double c1 = 1.0, c4 = nodes[0];
  c[0][0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int mn = std::min(i, order);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = nodes[static_cast<std::size_t>(i)];
    for (int j = 0; j < i; ++j) {
      const double c3 = nodes[static_cast<std::size_t>(i)] - nodes[static_cast<std::size_t>(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
      }
      for (int k = mn; k >= 1; --k) c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
      c[j][0] = c4 * c[j][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(n + 1));
  for (int i = 0; i <= n; ++i) w[static_cast<std::size_t>(i)] = c[i][order];
  return w;
}

/// Central second-order estimate of g^{(order)}(0) with step s, then two Richardson levels.
template <class G>
double richardson_derivative(const G& g, int order, double s) {
  if (order == 0) return g(0.0);
  const int half = (order + 1) / 2;
  std::vector<double> nodes;
  for (int m = -half; m <= half; ++m) nodes.push_back(m);
  const auto w = fd_weights(order, nodes);
  auto central = [&](double step) {
    double acc = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (w[i] != 0.0) acc += w[i] * g(nodes[i] * step);
    return acc / std::pow(step, order);
  };
  const double d0 = central(s), d1 = central(s / 2), d2 = central(s / 4);
  const double r0 = (4.0 * d1 - d0) / 3.0, r1 = (4.0 * d2 - d1) / 3.0;
  return (16.0 * r1 - r0) / 15.0;
}

}  // namespace detail

/// Smallest j with H_{Im p}^j Re p(rho) != 0, from derivatives of t -> Re p(exp(t H_{Im p}) rho).
///
/// The tolerance is relative to max(1, largest probe). Throws AssumptionViolation when
/// Re p(rho) != 0 or when every probe up to j_max vanishes.
inline BracketClassification bracket_order(const Symbol& sym, const PhasePoint& rho, int j_max = 8,
                                           double tol = 1e-6) {
  if (j_max < 1 || j_max > 8) throw ArgumentError("bracket_order: j_max must lie in [1, 8]");
  auto g = [&](double t) {
    if (t == 0.0) return sym.eval(rho).real();
    const int steps = std::max(8, static_cast<int>(std::ceil(std::abs(t) / 1e-3)));
    return sym.eval(flow(sym, Part::Imag, rho, t, steps).back()).real();
  };
  BracketClassification out;
  double scale = 1.0;
  for (int j = 0; j <= j_max; ++j) {
    const double step = 0.05 * (j + 2);
    const double v = detail::richardson_derivative(g, j, step);
    out.probe_values.push_back(v);
    scale = std::max(scale, std::abs(v));
    if (std::abs(v) > tol * scale) {
      if (j == 0) throw AssumptionViolation("bracket_order: Re p does not vanish at rho", "ev.11");
      out.order_k = j;
      out.coefficient = v;
      return out;
    }
  }
  throw AssumptionViolation("bracket_order: order exceeds j_max = " + std::to_string(j_max), "ev.11");
}

/// theta in [0, pi) with d(e^{-i theta}(p - z0)) real at rho.
inline double rotation_angle(const Symbol& sym, complex z0, const PhasePoint& rho) {
  if (std::abs(sym.eval(rho) - z0) > 1e-8 * std::max(1.0, std::abs(z0)))
    throw ArgumentError("rotation_angle: rho is not in p^{-1}(z0)");
  const auto g = sym.grad(rho);
  double gmax = 0.0;
  complex lead = 0.0;
  for (const auto& v : g)
    if (std::abs(v) > gmax) {
      gmax = std::abs(v);
      lead = v;
    }
  if (gmax == 0.0) throw ArgumentError("rotation_angle: dp = 0 at rho");
  double theta = std::fmod(std::arg(lead), std::numbers::pi);
  if (theta < 0.0) theta += std::numbers::pi;
  if (theta >= std::numbers::pi) theta -= std::numbers::pi;
  const complex rot = std::exp(complex(0.0, -theta));
  for (const auto& v : g)
    if (std::abs((rot * v).imag()) > 1e-8 * gmax)
      throw AssumptionViolation("rotation_angle: no rotation exists (dp is not a complex multiple of a real covector)",
                                "in1");
  return theta;
}

/// i^{-1}{p, conj p}(rho) = 2 sum_j Im(dp/dxi_j * conj(dp/dx_j)).
inline double poisson_bracket_self(const Symbol& sym, const PhasePoint& rho) {
  const std::size_t n = sym.dim();
  const auto g = sym.grad(rho);
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += 2.0 * (g[n + j] * std::conj(g[j])).imag();
  return acc;
}

}  // namespace sspc

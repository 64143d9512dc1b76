#pragma once

#include <cmath>
#include <filesystem>
#include <numbers>
#include <vector>

#include "sspc/errors.hpp"
#include "sspc/hamiltonian.hpp"
#include "sspc/io.hpp"
#include "sspc/operators.hpp"
#include "sspc/symbol.hpp"

namespace sspc {

/// Leading-order beam exp(i(xi0 (x - x0) + A (x - x0)^2/2)/h) times a cutoff, sampled on
/// x_j = 2 pi j/M and normalized to unit discrete L^2 norm (weight 2 pi/M).
struct GaussianBeam {
  PhasePoint center;
  complex A = 0.0;
  double h = 1.0;
  complex p_center = 0.0;  // p(center), the pinned spectral parameter
  std::vector<double> x;
  std::vector<complex> u;

  double weight() const { return 2.0 * std::numbers::pi / static_cast<double>(u.size()); }
  /// |u| drops by e^{-1/2} at this distance from the center
  double width() const { return std::sqrt(h / A.imag()); }
};

namespace detail {

/// 1 on |y| <= pi/4, 0 on |y| >= pi/2, smoothstep in between.
inline double half_circle_cutoff(double y) {
  const double a = std::abs(y), lo = std::numbers::pi / 4, hi = std::numbers::pi / 2;
  if (a <= lo) return 1.0;
  if (a >= hi) return 0.0;
  const double s = (hi - a) / (hi - lo);
  return s * s * (3.0 - 2.0 * s);
}

/// y in (-pi, pi] with y = x mod 2 pi.
inline double wrap_angle(double y) {
  const double tau = 2.0 * std::numbers::pi;
  y = std::fmod(y, tau);
  if (y > std::numbers::pi) y -= tau;
  if (y <= -std::numbers::pi) y += tau;
  return y;
}

inline int beam_points_needed(double width) { return static_cast<int>(std::ceil(8.0 * 2.0 * std::numbers::pi / width)); }

}  // namespace detail

/// Solves dp/dxi A + dp/dx = 0 at rho and samples the beam; grid = 0 picks the smallest power
/// of two >= 512 that resolves the beam with 8 points across its width.
inline GaussianBeam make_beam(const Symbol& sym, const PhasePoint& rho, double h, int grid = 0) {
  if (sym.dim() != 1 || rho.dim() != 1) throw UnsupportedModel("make_beam: one-dimensional symbols only");
  if (!sym.periodic(0)) throw UnsupportedModel("make_beam: the beam is periodized on the circle");
  if (!(h > 0.0) || !std::isfinite(h)) throw ArgumentError("make_beam: h must be positive");
  const double bracket = poisson_bracket_self(sym, rho);
  if (!(bracket > 0.0))
    throw AssumptionViolation("make_beam: i^{-1}{p, conj p} = " + io::fmt(bracket) + " is not positive at rho",
                              "in.18");
  const auto g = sym.grad(rho);
  if (std::abs(g[1]) < 1e-12) throw AssumptionViolation("make_beam: dp/dxi vanishes, no eikonal root", "in.18");
  GaussianBeam b;
  b.center = rho;
  b.A = -g[0] / g[1];
  if (!(b.A.imag() > 0.0))
    throw AssumptionViolation("make_beam: eikonal root has Im A = " + io::fmt(b.A.imag()) + " <= 0", "in.18");
  b.h = h;
  b.p_center = sym.eval(rho);
  const int needed = detail::beam_points_needed(b.width());
  int M = grid;
  if (M == 0) {
    M = 512;
    while (M < needed) M *= 2;
  }
  if (M < needed)
    throw ResolutionError("make_beam: grid of " + std::to_string(M) + " points has fewer than 8 points across the beam width " +
                          io::fmt(b.width()) + " (needs " + std::to_string(needed) + ")");
  const double x0 = rho.x[0], xi0 = rho.xi[0];
  b.x.resize(static_cast<std::size_t>(M));
  b.u.resize(static_cast<std::size_t>(M));
  double norm2 = 0.0;
  for (int j = 0; j < M; ++j) {
    const double x = 2.0 * std::numbers::pi * j / M;
    const double y = detail::wrap_angle(x - x0);
    const double c = detail::half_circle_cutoff(y);
    const complex v = c == 0.0 ? complex(0.0) : c * std::exp(complex(0.0, 1.0) * (xi0 * y + b.A * y * y / 2.0) / h);
    b.x[static_cast<std::size_t>(j)] = x;
    b.u[static_cast<std::size_t>(j)] = v;
    norm2 += std::norm(v);
  }
  const double scale = 1.0 / std::sqrt(norm2 * b.weight());
  for (auto& v : b.u) v *= scale;
  return b;
}

/// Discrete L^2 norm of the beam (1 after construction).
inline double beam_norm(const GaussianBeam& b) {
  double s = 0.0;
  for (auto v : b.u) s += std::norm(v);
  return std::sqrt(s * b.weight());
}

/// int (x - x0)^2 |u|^2 dx on the grid.
inline double beam_second_moment(const GaussianBeam& b) {
  double s = 0.0;
  for (std::size_t j = 0; j < b.u.size(); ++j) {
    const double y = detail::wrap_angle(b.x[j] - b.center.x[0]);
    s += y * y * std::norm(b.u[j]);
  }
  return s * b.weight();
}

/// Coefficients of the beam on the operator's Fourier modes, scaled so the coefficient norm is the L^2 norm.
inline Vector beam_coefficients(const DiscretizedOperator& op, const GaussianBeam& b) {
  if (op.basis != Basis::FourierCircle && op.basis != Basis::FourierTorus)
    throw UnsupportedModel("beam residual needs a Fourier basis on the circle (got " + std::string(basis_name(op.basis)) + ")");
  const int M = static_cast<int>(b.u.size());
  const double norm_factor = std::sqrt(2.0 * std::numbers::pi) / M;
  auto coefficient = [&](int n) {
    complex s = 0.0;
    for (int j = 0; j < M; ++j) s += b.u[static_cast<std::size_t>(j)] * std::polar(1.0, -n * b.x[static_cast<std::size_t>(j)]);
    return s * norm_factor;
  };
  const Eigen::Index N = op.size();
  Vector c(N);
  double inside = 0.0;
  for (Eigen::Index r = 0; r < N; ++r) {
    c(r) = coefficient(op.n_min + static_cast<int>(r));
    inside += std::norm(c(r));
  }
  // Parseval on the M-point grid: the total coefficient energy is the discrete norm squared
  const double total = std::pow(beam_norm(b), 2);
  const double outside = std::max(0.0, total - inside) / total;
  if (outside > 1e-10)
    throw ResolutionError("beam energy outside the operator's " + std::to_string(N) + " modes is " + io::fmt(outside) +
                          " (> 1e-10)");
  return c / std::sqrt(inside);
}

/// ||(A - z) u|| for the unit coefficient vector u of the beam; z must equal p(center).
inline double residual(const DiscretizedOperator& op, const GaussianBeam& b, complex z) {
  if (op.basis != Basis::FourierCircle && op.basis != Basis::FourierTorus)
    throw UnsupportedModel("beam residual needs a Fourier basis on the circle (got " + std::string(basis_name(op.basis)) + ")");
  if (std::abs(z - b.p_center) > 1e-10)
    throw ArgumentError("residual: z = " + io::fmt(z.real()) + "+" + io::fmt(z.imag()) + "i is not p(center)");
  if (std::abs(op.h - b.h) > 1e-14 * b.h) throw ArgumentError("residual: operator and beam use different h");
  const Vector c = beam_coefficients(op, b);
  return (op.matrix * c - z * c).norm();
}

/// Export: columns x, re_u, im_u.
inline void write_beam_csv(const std::filesystem::path& path, const GaussianBeam& b) {
  io::CsvWriter csv(path, {"x", "re_u", "im_u"});
  for (std::size_t j = 0; j < b.u.size(); ++j) csv.row({b.x[j], b.u[j].real(), b.u[j].imag()});
  csv.close();
}

}  // namespace sspc

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <vector>

#include "sspc/errors.hpp"
#include "sspc/fit.hpp"
#include "sspc/hamiltonian.hpp"
#include "sspc/io.hpp"
#include "sspc/parallel.hpp"
#include "sspc/symbol.hpp"

namespace sspc {

/// Uniform lattice over (x, xi) in R^2; a periodic x axis excludes its right endpoint.
struct PhaseLattice {
  double x_lo = 0.0, x_step = 0.0;
  int x_count = 0;
  bool x_periodic = false;
  double xi_lo = 0.0, xi_step = 0.0;
  int xi_count = 0;

  static PhaseLattice make(double x_lo, double x_hi, int nx, double xi_lo, double xi_hi, int nxi, bool periodic_x) {
    if (nx < 16 || nxi < 16) throw ArgumentError("PhaseLattice: at least 16 nodes per axis");
    if (!(x_hi > x_lo) || !(xi_hi > xi_lo)) throw ArgumentError("PhaseLattice: empty axis range");
    PhaseLattice l;
    l.x_lo = x_lo, l.x_count = nx, l.x_periodic = periodic_x;
    l.x_step = (x_hi - x_lo) / (periodic_x ? nx : nx - 1);
    l.xi_lo = xi_lo, l.xi_count = nxi;
    l.xi_step = (xi_hi - xi_lo) / (nxi - 1);
    return l;
  }

  std::size_t size() const noexcept { return static_cast<std::size_t>(x_count) * static_cast<std::size_t>(xi_count); }
  double x(int i) const noexcept { return x_lo + i * x_step; }
  double xi(int j) const noexcept { return xi_lo + j * xi_step; }
  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(xi_count) + static_cast<std::size_t>(j);
  }
  double x_hi() const noexcept { return x_periodic ? x_lo + x_count * x_step : x(x_count - 1); }
  double xi_hi() const noexcept { return xi(xi_count - 1); }
  double spacing() const noexcept { return std::min(x_step, xi_step); }

  bool contains(const PhasePoint& p) const {
    const bool x_ok = x_periodic || (p.x[0] >= x_lo && p.x[0] <= x_hi());
    return x_ok && p.xi[0] >= xi_lo && p.xi[0] <= xi_hi();
  }
};

/// G_t on a lattice (row-major, x outer) with its (dG/dx, dG/dxi) cache.
struct WeightField {
  double t = 0.0;
  std::vector<double> values;
  std::vector<std::array<double, 2>> gradient;
};

namespace detail {

inline std::vector<std::array<double, 2>> lattice_gradient(const PhaseLattice& L, const std::vector<double>& g) {
  std::vector<std::array<double, 2>> d(L.size());
  const int nx = L.x_count, ny = L.xi_count;
  for (int i = 0; i < nx; ++i)
    for (int j = 0; j < ny; ++j) {
      double gx;
      if (L.x_periodic) {
        gx = (g[L.index((i + 1) % nx, j)] - g[L.index((i + nx - 1) % nx, j)]) / (2.0 * L.x_step);
      } else if (i == 0) {
        gx = (-3.0 * g[L.index(0, j)] + 4.0 * g[L.index(1, j)] - g[L.index(2, j)]) / (2.0 * L.x_step);
      } else if (i == nx - 1) {
        gx = (3.0 * g[L.index(i, j)] - 4.0 * g[L.index(i - 1, j)] + g[L.index(i - 2, j)]) / (2.0 * L.x_step);
      } else {
        gx = (g[L.index(i + 1, j)] - g[L.index(i - 1, j)]) / (2.0 * L.x_step);
      }
      double gy;
      if (j == 0)
        gy = (-3.0 * g[L.index(i, 0)] + 4.0 * g[L.index(i, 1)] - g[L.index(i, 2)]) / (2.0 * L.xi_step);
      else if (j == ny - 1)
        gy = (3.0 * g[L.index(i, j)] - 4.0 * g[L.index(i, j - 1)] + g[L.index(i, j - 2)]) / (2.0 * L.xi_step);
      else
        gy = (g[L.index(i, j + 1)] - g[L.index(i, j - 1)]) / (2.0 * L.xi_step);
      d[L.index(i, j)] = {gx, gy};
    }
  return d;
}

}  // namespace detail

/// Re p(rho + i H_G(rho)) at every node, with H_G = (dG/dxi, -dG/dx).
inline std::vector<double> weight_forcing(const Symbol& sym, const PhaseLattice& L,
                                          const std::vector<std::array<double, 2>>& grad, unsigned workers = 1) {
  if (sym.dim() != 1) throw ArgumentError("weight_forcing: one-dimensional symbols only");
  std::vector<double> f(L.size());
  parallel_for(static_cast<std::size_t>(L.x_count), workers, [&](std::size_t ii) {
    const int i = static_cast<int>(ii);
    for (int j = 0; j < L.xi_count; ++j) {
      const auto& d = grad[L.index(i, j)];
      const ComplexPhasePoint z(complex(L.x(i), d[1]), complex(L.xi(j), -d[0]));
      const double v = sym.eval_complex(z).real();
      if (!std::isfinite(v)) throw EvaluationError("weight_forcing: non-finite Re p at a complexified node");
      f[L.index(i, j)] = v;
    }
  });
  return f;
}

/// Largest characteristic speed |(Im dp/dxi, -Im dp/dx)| at the complexified nodes rho + i H_G.
///
/// At G = 0 this is max |grad Im p|; it grows with |grad G| for symbols that are not affine.
inline double effective_speed(const Symbol& sym, const PhaseLattice& L, const std::vector<std::array<double, 2>>& grad) {
  const double e = 1e-6;
  double s = 0.0;
  for (int i = 0; i < L.x_count; ++i)
    for (int j = 0; j < L.xi_count; ++j) {
      const auto& d = grad[L.index(i, j)];
      const complex x(L.x(i), d[1]), xi(L.xi(j), -d[0]);
      const complex px = (sym.eval_complex({x + e, xi}) - sym.eval_complex({x - e, xi})) / (2 * e);
      const complex pxi = (sym.eval_complex({x, xi + e}) - sym.eval_complex({x, xi - e})) / (2 * e);
      s = std::max(s, std::hypot(px.imag(), pxi.imag()));
    }
  return s;
}

/// Largest |grad Im p| over the lattice nodes.
inline double max_imag_speed(const Symbol& sym, const PhaseLattice& L) {
  double s = 0.0;
  for (int i = 0; i < L.x_count; ++i)
    for (int j = 0; j < L.xi_count; ++j) {
      const auto g = sym.grad(PhasePoint(L.x(i), L.xi(j)));
      s = std::max(s, std::hypot(g[0].imag(), g[1].imag()));
    }
  return s;
}

/// Stable step bound 0.25 * spacing / max|grad Im p|.
inline double cfl_bound(const Symbol& sym, const PhaseLattice& L) {
  const double s = max_imag_speed(sym, L);
  return s == 0.0 ? std::numeric_limits<double>::infinity() : 0.25 * L.spacing() / s;
}

struct EvolveOptions {
  unsigned workers = 1;
  double positivity_tolerance = 1e-10;
};

/// Solves dG/dt + Re p(rho + i H_G) = 0, G_0 = 0, by explicit midpoint steps.
///
/// `dt <= 0` selects the CFL bound. The step is shrunk so that t_end is hit exactly.
/// Each step re-checks the Courant number with the speed at rho + i H_G and stops above 0.5.
/// Returns every slab including t = 0.
inline std::vector<WeightField> evolve_G(const Symbol& sym, const PhaseLattice& L, double t_end, double dt,
                                         const EvolveOptions& opts = {}) {
  if (!(t_end > 0.0) || t_end > 1.0) throw ArgumentError("evolve_G: t_end must lie in (0, 1]");
  const double bound = cfl_bound(sym, L);
  if (dt <= 0.0) dt = std::isfinite(bound) ? bound : t_end / 16.0;
  if (dt > bound * (1.0 + 1e-12))
    throw ArgumentError("evolve_G: dt = " + io::fmt(dt) + " exceeds the CFL bound " + io::fmt(bound));
  const int steps = std::max(1, static_cast<int>(std::ceil(t_end / dt - 1e-9)));
  dt = t_end / steps;

  std::vector<WeightField> out;
  out.reserve(static_cast<std::size_t>(steps) + 1);
  WeightField f0{0.0, std::vector<double>(L.size(), 0.0), {}};
  f0.gradient = detail::lattice_gradient(L, f0.values);
  out.push_back(std::move(f0));

  std::vector<double> mid(L.size());
  for (int s = 1; s <= steps; ++s) {
    const WeightField& prev = out.back();
    const double speed = effective_speed(sym, L, prev.gradient);
    if (dt * speed > 0.5 * L.spacing())
      throw ConvergenceError("evolve_G: Courant number " + io::fmt(dt * speed / L.spacing()) + " at t = " +
                             io::fmt(prev.t) + " exceeds 0.5 as grad G grows; reduce dt or the lattice extent");
    const auto f1 = weight_forcing(sym, L, prev.gradient, opts.workers);
    for (std::size_t n = 0; n < L.size(); ++n) mid[n] = prev.values[n] - 0.5 * dt * f1[n];
    const auto f2 = weight_forcing(sym, L, detail::lattice_gradient(L, mid), opts.workers);
    WeightField next;
    next.t = s * dt;
    next.values.resize(L.size());
    for (std::size_t n = 0; n < L.size(); ++n) {
      next.values[n] = prev.values[n] - dt * f2[n];
      if (next.values[n] > opts.positivity_tolerance)
        throw AssumptionViolation("evolve_G: G_t > 0 at t = " + io::fmt(next.t) + " (requires Re p >= 0)", "re.2");
    }
    next.gradient = detail::lattice_gradient(L, next.values);
    out.push_back(std::move(next));
  }
  return out;
}

/// Linearized weight: -J(t, rho), the characteristic solution with |grad G|^2 dropped.
inline double G_characteristic(const Symbol& sym, const PhasePoint& rho, double t, int steps = 200) {
  if (!(t >= 0.0) || t > 1.0) throw ArgumentError("G_characteristic: t must lie in [0, 1]");
  return -accumulate_J(sym, rho, t, steps);
}

/// Bilinear interpolation of a slab at rho; throws when rho is outside the lattice.
inline double interpolate(const PhaseLattice& L, const WeightField& f, const PhasePoint& rho) {
  if (!L.contains(rho)) throw ArgumentError("interpolate: point outside the lattice");
  double u = (rho.x[0] - L.x_lo) / L.x_step;
  if (L.x_periodic) u -= L.x_count * std::floor(u / L.x_count);
  const double v = (rho.xi[0] - L.xi_lo) / L.xi_step;
  int i0 = static_cast<int>(std::floor(u)), j0 = static_cast<int>(std::floor(v));
  if (!L.x_periodic) i0 = std::clamp(i0, 0, L.x_count - 2);
  j0 = std::clamp(j0, 0, L.xi_count - 2);
  const double a = u - i0, b = v - j0;
  const int i1 = L.x_periodic ? (i0 + 1) % L.x_count : i0 + 1;
  i0 = L.x_periodic ? i0 % L.x_count : i0;
  const auto& g = f.values;
  return (1 - a) * (1 - b) * g[L.index(i0, j0)] + a * (1 - b) * g[L.index(i1, j0)] +
         (1 - a) * b * g[L.index(i0, j0 + 1)] + a * b * g[L.index(i1, j0 + 1)];
}

/// Result of fitting -G_t ~ c t^e over the orbit.
struct DecayCertificate {
  ScalingFit fit;
  double C = 0.0;                 // smallest C with G_t <= -t^{k+1}/C on the window
  bool consistent = false;        // |e - (k+1)| <= 0.1 (k+1)
  std::vector<double> times;
  std::vector<double> least_decay;  // -max over orbit of G_t
};

/// Fits log(-max_orbit G_t) against log t over t in `window`.
inline DecayCertificate certify_decay(const PhaseLattice& L, const std::vector<WeightField>& fields, int k,
                                      const std::vector<PhasePoint>& orbit, std::array<double, 2> window = {0.05, 0.5}) {
  if (k < 1) throw ArgumentError("certify_decay: k must be >= 1");
  if (orbit.empty()) throw ArgumentError("certify_decay: empty orbit");
  for (const auto& p : orbit)
    if (!L.contains(p)) throw ArgumentError("certify_decay: orbit point outside the lattice");
  DecayCertificate c;
  for (const auto& f : fields) {
    if (f.t < window[0] - 1e-12 || f.t > window[1] + 1e-12) continue;
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& p : orbit) worst = std::max(worst, interpolate(L, f, p));
    if (!(worst < 0.0))
      throw AssumptionViolation("certify_decay: G_t >= 0 on the orbit at t = " + io::fmt(f.t), "ev.15");
    c.times.push_back(f.t);
    c.least_decay.push_back(-worst);
  }
  c.fit = fit_power_law(c.times, c.least_decay, window);
  for (std::size_t i = 0; i < c.times.size(); ++i)
    c.C = std::max(c.C, std::pow(c.times[i], k + 1) / c.least_decay[i]);
  c.consistent = std::abs(c.fit.exponent - (k + 1)) <= 0.1 * (k + 1);
  return c;
}

/// Slab export: columns t, x, xi, G; every `every`-th slab.
inline void write_weight_csv(const std::filesystem::path& path, const PhaseLattice& L,
                             const std::vector<WeightField>& fields, int every = 1) {
  if (every < 1) throw ArgumentError("write_weight_csv: every must be >= 1");
  io::CsvWriter csv(path, {"t", "x", "xi", "G"});
  for (std::size_t s = 0; s < fields.size(); s += static_cast<std::size_t>(every))
    for (int i = 0; i < L.x_count; ++i)
      for (int j = 0; j < L.xi_count; ++j) csv.row({fields[s].t, L.x(i), L.xi(j), fields[s].values[L.index(i, j)]});
  csv.close();
}

}  // namespace sspc

#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/special_functions/legendre.hpp>

#include "sspc/errors.hpp"
#include "sspc/fit.hpp"
#include "sspc/io.hpp"
#include "sspc/operators.hpp"
#include "sspc/parallel.hpp"

namespace sspc {

/// ||(z - A)^{-1}|| or, when z - A is numerically singular, a lower bound for it.
struct ResolventNorm {
  double value = 0.0;
  double sigma_min = 0.0;
  bool singular = false;
};

namespace detail {

/// Smallest singular value by inverse iteration on M^* M through one LU factorization.
inline double sigma_min_inverse_iteration(const Matrix& M) {
  Eigen::PartialPivLU<Matrix> lu(M);
  Vector x = Vector::Ones(M.rows()).normalized();
  double lambda = 0.0;  // converges to 1/sigma_min^2
  for (int it = 0; it < 500; ++it) {
    Vector y = lu.solve(x);
    y = lu.adjoint().solve(y);
    const double next = y.norm();
    if (!std::isfinite(next)) return 0.0;
    x = y / next;
    const bool settled = it > 2 && std::abs(next - lambda) <= 1e-12 * next;
    lambda = next;
    if (settled) break;
  }
  return 1.0 / std::sqrt(lambda);
}

}  // namespace detail

/// 1/sigma_min(zI - A): full SVD for N <= 1024, inverse iteration above.
///
/// Flags `singular` when sigma_min < 1e-14 ||A||_F and reports the lower bound 1/(1e-14 ||A||_F).
inline ResolventNorm resolvent_norm(const DiscretizedOperator& op, complex z) {
  const Eigen::Index N = op.size();
  Matrix M = -op.matrix;
  M.diagonal().array() += z;
  double smin;
  if (N <= 1024) {
    Eigen::BDCSVD<Matrix> svd(M);
    smin = svd.singularValues()(N - 1);
  } else {
    smin = detail::sigma_min_inverse_iteration(M);
  }
  const double floor = 1e-14 * std::max(op.matrix.norm(), std::numeric_limits<double>::min());
  ResolventNorm r;
  r.sigma_min = smin;
  if (smin < floor) {
    r.singular = true;
    r.value = 1.0 / floor;
  } else {
    r.value = 1.0 / smin;
  }
  return r;
}

/// Axis-aligned rectangle of the complex plane with node counts, endpoints included.
struct ZLattice {
  double re_lo = 0.0, re_hi = 0.0, im_lo = 0.0, im_hi = 0.0;
  int nx = 1, ny = 1;

  complex node(int ix, int iy) const {
    const double re = nx == 1 ? re_lo : re_lo + (re_hi - re_lo) * ix / (nx - 1);
    const double im = ny == 1 ? im_lo : im_lo + (im_hi - im_lo) * iy / (ny - 1);
    return {re, im};
  }
};

/// log10 ||(z - A)^{-1}|| over a z-lattice, row-major with the imaginary index outer.
struct PseudospectrumMap {
  ZLattice lattice;
  std::vector<double> log10_norm;
  std::vector<bool> singular;
  double h = 1.0;
  std::string model;
};

inline PseudospectrumMap pseudospectrum_map(const DiscretizedOperator& op, const ZLattice& lat, unsigned workers = 1) {
  if (lat.nx < 1 || lat.ny < 1) throw ArgumentError("pseudospectrum_map: empty lattice");
  if (static_cast<double>(lat.nx) * lat.ny > 1e6) throw ArgumentError("pseudospectrum_map: more than 1e6 nodes");
  PseudospectrumMap m;
  m.lattice = lat;
  m.h = op.h;
  m.model = op.model;
  const std::size_t n = static_cast<std::size_t>(lat.nx) * static_cast<std::size_t>(lat.ny);
  m.log10_norm.assign(n, 0.0);
  std::vector<char> flags(n, 0);
  parallel_for(n, workers, [&](std::size_t k) {
    const int iy = static_cast<int>(k / static_cast<std::size_t>(lat.nx)), ix = static_cast<int>(k % static_cast<std::size_t>(lat.nx));
    const auto r = resolvent_norm(op, lat.node(ix, iy));
    m.log10_norm[k] = std::log10(r.value);
    flags[k] = r.singular;
  });
  m.singular.assign(flags.begin(), flags.end());
  return m;
}

/// Export: columns re_z, im_z, log10_norm in lattice order.
inline void write_pseudospectrum_csv(const std::filesystem::path& path, const PseudospectrumMap& m) {
  io::CsvWriter csv(path, {"re_z", "im_z", "log10_norm"});
  for (int iy = 0; iy < m.lattice.ny; ++iy)
    for (int ix = 0; ix < m.lattice.nx; ++ix) {
      const complex z = m.lattice.node(ix, iy);
      csv.row({z.real(), z.imag(), m.log10_norm[static_cast<std::size_t>(iy) * m.lattice.nx + ix]});
    }
  csv.close();
}

/// ||exp(-tA/h)|| on an increasing time grid starting at 0.
struct SemigroupTrace {
  std::vector<double> t;
  std::vector<double> norms;
  double h = 1.0;
  std::vector<std::string> warnings;
};

inline double operator_norm(const Matrix& M) {
  Eigen::BDCSVD<Matrix> svd(M);
  return svd.singularValues()(0);
}

/// Propagates U(t) = exp(-tA/h) interval by interval (scaling and squaring per interval).
///
/// Each interval is split into 1, 2, 4, ... equal substeps until the norm changes by less than
/// 1e-8 relative between successive splittings.
inline SemigroupTrace semigroup_trace(const DiscretizedOperator& op, const std::vector<double>& t_grid) {
  if (t_grid.empty() || t_grid.front() != 0.0) throw ArgumentError("semigroup_trace: t_grid must start at 0");
  for (std::size_t i = 1; i < t_grid.size(); ++i)
    if (!(t_grid[i] > t_grid[i - 1]) || !std::isfinite(t_grid[i]))
      throw ArgumentError("semigroup_trace: t_grid must be strictly increasing and finite");
  SemigroupTrace tr;
  tr.h = op.h;
  const double edge = numerical_range_left_edge(op);
  if (edge < -1e-10)
    tr.warnings.push_back("operator is not accretive: min Re <Au,u> = " + io::fmt(edge) +
                          "; the semigroup may grow");
  const Eigen::Index N = op.size();
  Matrix U = Matrix::Identity(N, N);
  tr.t.push_back(0.0);
  tr.norms.push_back(1.0);
  const Matrix G = -op.matrix / op.h;
  for (std::size_t i = 1; i < t_grid.size(); ++i) {
    const double dt = t_grid[i] - t_grid[i - 1];
    double prev_norm = -1.0;
    bool converged = false;
    for (int level = 0; level <= 8; ++level) {
      const int sub = 1 << level;
      const Matrix E = (G * (dt / sub)).exp();
      Matrix V = U;
      for (int s = 0; s < sub; ++s) V = E * V;
      const double nv = V.allFinite() ? operator_norm(V) : std::numeric_limits<double>::infinity();
      if (!std::isfinite(nv) || nv > 1e300)
        throw ConvergenceError("semigroup_trace: overflow at t = " + io::fmt(t_grid[i]) +
                               "; max Re of -A (growth rate times h) = " + io::fmt(-edge));
      if (prev_norm >= 0.0 && std::abs(nv - prev_norm) <= 1e-8 * std::max(nv, 1e-300)) {
        U = std::move(V);
        converged = true;
        break;
      }
      prev_norm = nv;
    }
    if (!converged) throw ConvergenceError("semigroup_trace: step halving did not settle at t = " + io::fmt(t_grid[i]));
    tr.t.push_back(t_grid[i]);
    tr.norms.push_back(operator_norm(U));
  }
  return tr;
}

/// Export: columns t, norm.
inline void write_semigroup_csv(const std::filesystem::path& path, const SemigroupTrace& tr) {
  io::CsvWriter csv(path, {"t", "norm"});
  for (std::size_t i = 0; i < tr.t.size(); ++i) csv.row({tr.t[i], tr.norms[i]});
  csv.close();
}

/// Fits -h ln ||U(t)|| ~ c t^e over the window; a sample without decay is an argument error.
inline ScalingFit semigroup_decay_fit(const SemigroupTrace& tr, std::array<double, 2> window = {0.2, 0.8}) {
  std::vector<double> ts, ys;
  for (std::size_t i = 0; i < tr.t.size(); ++i) {
    const double y = -tr.h * std::log(tr.norms[i]);
    if (tr.t[i] >= window[0] && tr.t[i] <= window[1]) {
      if (!(y > 0.0)) throw ArgumentError("semigroup_decay_fit: no decay at t = " + io::fmt(tr.t[i]));
      ts.push_back(tr.t[i]);
      ys.push_back(y);
    }
  }
  return fit_power_law(ts, ys, window);
}

/// Gauss-Legendre nodes and weights on [-1, 1].
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int q) {
  if (q < 1 || q > 100) throw ArgumentError("gauss_legendre: 1 <= points <= 100");
  const auto zeros = boost::math::legendre_p_zeros<double>(q);  // nonnegative zeros, ascending
  std::vector<double> x, w;
  for (auto it = zeros.rbegin(); it != zeros.rend(); ++it) {
    if (*it == 0.0) continue;
    x.push_back(-*it);
  }
  if (q % 2 == 1) x.push_back(0.0);
  for (double z : zeros)
    if (z != 0.0) x.push_back(z);
  for (double xi : x) {
    const double d = boost::math::legendre_p_prime<double>(q, xi);
    w.push_back(2.0 / ((1.0 - xi * xi) * d * d));
  }
  return {x, w};
}

struct QuadratureOptions {
  double delta = 0.02;       // upper limit T = h^delta
  int quad_points = 16;      // Gauss-Legendre points per panel
  int k = 2;                 // bracket order; requires delta (k + 1) < 1
  double rel_tol = 1e-6;     // successive panel-doubling agreement, Frobenius norm
  int max_panels = 4096;
};

/// Quadrature approximation of (zI - A)^{-1}:  -(1/h) int_0^{h^delta} e^{tz/h} U(t) dt, one per z.
///
/// All z share the propagator samples; panels are doubled until every result settles.
inline std::vector<Matrix> quadrature_resolvent(const DiscretizedOperator& op, const std::vector<complex>& zs,
                                                const QuadratureOptions& opt = {}) {
  if (!(opt.delta > 0.0) || opt.delta * (opt.k + 1) >= 1.0)
    throw AssumptionViolation("quadrature_resolvent: delta (k + 1) < 1 is required", "re.8");
  if (zs.empty()) throw ArgumentError("quadrature_resolvent: no z given");
  const double h = op.h, T = std::pow(h, opt.delta);
  const Eigen::Index N = op.size();
  const auto [gx, gw] = gauss_legendre(opt.quad_points);
  const Matrix G = -op.matrix / h;

  auto integrate = [&](int panels) {
    const double width = T / panels;
    std::vector<Matrix> nodes;  // U(width (x_j + 1)/2)
    for (double x : gx) nodes.push_back((G * (0.5 * width * (x + 1.0))).exp());
    const Matrix step = (G * width).exp();
    std::vector<Matrix> acc(zs.size(), Matrix::Zero(N, N));
    Matrix base = Matrix::Identity(N, N);  // U(p width)
    for (int p = 0; p < panels; ++p) {
      for (std::size_t j = 0; j < gx.size(); ++j) {
        const double t = p * width + 0.5 * width * (gx[j] + 1.0);
        const Matrix Ut = nodes[j] * base;
        for (std::size_t iz = 0; iz < zs.size(); ++iz) acc[iz] += (0.5 * width * gw[j]) * std::exp(t * zs[iz] / h) * Ut;
      }
      base = step * base;
    }
    for (auto& a : acc) a *= -1.0 / h;
    return acc;
  };

  std::vector<Matrix> prev = integrate(1);
  for (int panels = 2; panels <= opt.max_panels; panels *= 2) {
    std::vector<Matrix> cur = integrate(panels);
    double worst = 0.0, last_prev = 0.0, last_cur = 0.0;
    for (std::size_t iz = 0; iz < zs.size(); ++iz) {
      const double d = (cur[iz] - prev[iz]).norm() / std::max(cur[iz].norm(), 1e-300);
      if (d > worst) worst = d, last_prev = prev[iz].norm(), last_cur = cur[iz].norm();
    }
    if (worst <= opt.rel_tol) return cur;
    if (panels * 2 > opt.max_panels)
      throw ConvergenceError("quadrature_resolvent: no convergence at " + std::to_string(panels) +
                             " panels (last two panel norms " + io::fmt(last_prev) + ", " + io::fmt(last_cur) + ")");
    prev = std::move(cur);
  }
  throw ConvergenceError("quadrature_resolvent: max_panels below 2");
}

inline Matrix quadrature_resolvent(const DiscretizedOperator& op, complex z, const QuadratureOptions& opt = {}) {
  return quadrature_resolvent(op, std::vector<complex>{z}, opt).front();
}

/// Tail factor ||exp(T (z - A)/h)|| at T = h^delta; the quadrature misses (zI - A)^{-1} by this factor.
inline double quadrature_tail(const DiscretizedOperator& op, complex z, double delta) {
  const double T = std::pow(op.h, delta);
  Matrix M = -op.matrix;
  M.diagonal().array() += z;
  return operator_norm((M * (T / op.h)).exp());
}

/// h -> threshold on ||(z - A)^{-1}|| used by critical_radius.
struct ThresholdRule {
  enum class Kind { Polynomial, BoundaryMultiple, ExpQuarter, Fixed };
  Kind kind = Kind::Polynomial;
  double a = 2.0;  // Polynomial: h^{-a}; BoundaryMultiple: K; Fixed: the value
  int k = 2;       // BoundaryMultiple: K h^{-k/(k+1)}

  static ThresholdRule polynomial(double a) { return {Kind::Polynomial, a, 2}; }
  static ThresholdRule boundary_multiple(double K, int k) { return {Kind::BoundaryMultiple, K, k}; }
  static ThresholdRule exp_quarter() { return {Kind::ExpQuarter, 0.0, 2}; }
  static ThresholdRule fixed(double v) { return {Kind::Fixed, v, 2}; }

  double value(double h) const {
    switch (kind) {
      case Kind::Polynomial: return std::pow(h, -a);
      case Kind::BoundaryMultiple: return a * std::pow(h, -static_cast<double>(k) / (k + 1));
      case Kind::ExpQuarter: return std::exp(std::pow(h, -0.25));
      case Kind::Fixed: return a;
    }
    return a;
  }
};

struct CriticalRadiusOptions {
  double hi = 0.5;        // search interval [0, hi]
  int scan = 50;          // uniform cells scanned for the first crossing
  double rel_tol = 1e-3;  // bisection stops at (hi - lo) <= rel_tol * lo
};

struct CriticalRadius {
  double delta = 0.0;
  bool crossed = false;   // false: threshold never exceeded on [0, hi], delta = hi
  double threshold = 0.0;
  double norm_at_start = 0.0;
  int evaluations = 0;
};

/// First delta in [0, hi] with ||(z0 + delta d - A)^{-1}|| > threshold.
///
/// A uniform scan finds the first crossing cell before bisecting, so a resolvent that
/// falls again beyond the crossing (truncation effects) cannot mislead the search.
inline CriticalRadius critical_radius(const DiscretizedOperator& op, complex z0, complex direction, double threshold,
                                      const CriticalRadiusOptions& opt = {}) {
  if (std::abs(std::abs(direction) - 1.0) > 1e-12) throw ArgumentError("critical_radius: direction must be a unit");
  if (!(opt.hi > 0.0) || opt.scan < 1 || !(opt.rel_tol > 0.0)) throw ArgumentError("critical_radius: bad options");
  CriticalRadius out;
  out.threshold = threshold;
  auto above = [&](double d) {
    ++out.evaluations;
    return resolvent_norm(op, z0 + d * direction).value > threshold;
  };
  out.norm_at_start = resolvent_norm(op, z0).value;
  if (out.norm_at_start > threshold) {
    out.crossed = true;
    return out;
  }
  double lo = 0.0, hi = -1.0;
  for (int c = 1; c <= opt.scan; ++c) {
    const double d = opt.hi * c / opt.scan;
    if (above(d)) {
      hi = d;
      break;
    }
    lo = d;
  }
  if (hi < 0.0) {
    out.delta = opt.hi;
    return out;
  }
  const double floor = opt.hi / opt.scan * 1e-6;
  while (hi - lo > opt.rel_tol * std::max(lo, floor)) {
    const double m = 0.5 * (lo + hi);
    (above(m) ? hi : lo) = m;
  }
  out.delta = 0.5 * (lo + hi);
  out.crossed = true;
  return out;
}

inline CriticalRadius critical_radius(const DiscretizedOperator& op, complex z0, complex direction,
                                      const ThresholdRule& rule, const CriticalRadiusOptions& opt = {}) {
  return critical_radius(op, z0, direction, rule.value(op.h), opt);
}

}  // namespace sspc

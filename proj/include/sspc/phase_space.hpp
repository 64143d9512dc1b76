#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "sspc/errors.hpp"

namespace sspc {

using complex = std::complex<double>;

/// Point rho = (x, xi) of real phase space T*R^n.
struct PhasePoint {
  std::vector<double> x;
  std::vector<double> xi;

  PhasePoint() = default;
  PhasePoint(std::vector<double> x_, std::vector<double> xi_) : x(std::move(x_)), xi(std::move(xi_)) {
    if (x.size() != xi.size() || x.empty()) throw ArgumentError("PhasePoint: x and xi must have equal positive length");
  }
  /// One-dimensional shorthand.
  PhasePoint(double x1, double xi1) : x{x1}, xi{xi1} {}

  std::size_t dim() const noexcept { return x.size(); }

  bool finite() const noexcept {
    for (std::size_t j = 0; j < x.size(); ++j)
      if (!std::isfinite(x[j]) || !std::isfinite(xi[j])) return false;
    return true;
  }

  /// Coordinates stacked as (x_1..x_n, xi_1..xi_n).
  std::vector<double> stacked() const {
    std::vector<double> v(x);
    v.insert(v.end(), xi.begin(), xi.end());
    return v;
  }

  static PhasePoint from_stacked(const std::vector<double>& v) {
    const std::size_t n = v.size() / 2;
    return PhasePoint(std::vector<double>(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n)),
                      std::vector<double>(v.begin() + static_cast<std::ptrdiff_t>(n), v.end()));
  }
};

/// Point of complexified phase space C^{2n}.
struct ComplexPhasePoint {
  std::vector<complex> x;
  std::vector<complex> xi;

  ComplexPhasePoint() = default;
  ComplexPhasePoint(std::vector<complex> x_, std::vector<complex> xi_) : x(std::move(x_)), xi(std::move(xi_)) {}
  ComplexPhasePoint(complex x1, complex xi1) : x{x1}, xi{xi1} {}
  explicit ComplexPhasePoint(const PhasePoint& p) : x(p.x.begin(), p.x.end()), xi(p.xi.begin(), p.xi.end()) {}

  std::size_t dim() const noexcept { return x.size(); }
};

/// Axis-aligned box in phase space; coordinates flagged periodic never leave it.
struct PhaseBox {
  std::vector<double> x_lo, x_hi, xi_lo, xi_hi;

  bool contains(const PhasePoint& p, const std::vector<bool>& periodic_x) const {
    for (std::size_t j = 0; j < p.dim(); ++j) {
      const bool periodic = j < periodic_x.size() && periodic_x[j];
      if (!periodic && (p.x[j] < x_lo[j] || p.x[j] > x_hi[j])) return false;
      if (p.xi[j] < xi_lo[j] || p.xi[j] > xi_hi[j]) return false;
    }
    return true;
  }

  static PhaseBox uniform(std::size_t n, double xlo, double xhi, double xilo, double xihi) {
    return PhaseBox{std::vector<double>(n, xlo), std::vector<double>(n, xhi), std::vector<double>(n, xilo),
                    std::vector<double>(n, xihi)};
  }
};

}  // namespace sspc

#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "sspc/errors.hpp"
#include "sspc/phase_space.hpp"

namespace sspc {

/// Finite Fourier series g(x) = sum_{|m| <= degree} c_m e^{imx}; entire in x.
class TrigPolynomial {
 public:
  TrigPolynomial() : coeffs_{complex{0.0}} {}

  /// Coefficients ordered c_{-d}, ..., c_0, ..., c_d; the size must be odd.
  explicit TrigPolynomial(std::vector<complex> coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() % 2 == 0) throw ArgumentError("TrigPolynomial: coefficient count must be odd");
  }

  /// a cos x
  static TrigPolynomial cosine(complex a) { return TrigPolynomial({a / 2.0, 0.0, a / 2.0}); }
  static TrigPolynomial zero() { return TrigPolynomial(); }

  int degree() const noexcept { return static_cast<int>(coeffs_.size() / 2); }

  /// Coefficient c_m; zero outside the support.
  complex coefficient(int m) const noexcept {
    const int d = degree();
    if (m < -d || m > d) return 0.0;
    return coeffs_[static_cast<std::size_t>(m + d)];
  }

  complex operator()(complex x) const {
    complex s = 0.0;
    const int d = degree();
    for (int m = -d; m <= d; ++m) s += coefficient(m) * std::exp(complex(0.0, m) * x);
    return s;
  }

  complex derivative(complex x) const {
    complex s = 0.0;
    const int d = degree();
    for (int m = -d; m <= d; ++m) s += complex(0.0, m) * coefficient(m) * std::exp(complex(0.0, m) * x);
    return s;
  }

  complex mean() const noexcept { return coefficient(0); }

 private:
  std::vector<complex> coeffs_;
};

/// Structural data a matrix builder needs to discretize a symbol exactly.
struct ModelData {
  enum class Family { CircleAdvection, TorusSchrodinger, HarmonicOscillator, KramersFokkerPlanck, Custom };
  Family family = Family::Custom;
  TrigPolynomial potential;             // g for circle advection, V for torus Schrodinger
  complex prefactor = 1.0;              // p = prefactor * (base - shift)
  complex shift = 0.0;
};

/// Principal symbol p(x, xi) with its exact holomorphic extension and gradient.
///
/// Values are immutable after construction; copies share the evaluators.
class Symbol {
 public:
  using ComplexEval = std::function<complex(const ComplexPhasePoint&)>;
  using Gradient = std::function<std::vector<complex>(const PhasePoint&)>;

  Symbol(std::string name, std::size_t dim, ComplexEval eval_complex, Gradient grad, std::vector<bool> periodic,
         PhaseBox box, ModelData model = {})
      : name_(std::move(name)),
        dim_(dim),
        eval_complex_(std::move(eval_complex)),
        grad_(std::move(grad)),
        periodic_(std::move(periodic)),
        box_(std::move(box)),
        model_(std::move(model)) {
    if (dim_ == 0) throw ArgumentError("Symbol: dimension must be at least 1");
    periodic_.resize(dim_, false);
  }

  const std::string& name() const noexcept { return name_; }
  std::size_t dim() const noexcept { return dim_; }

  complex eval(const PhasePoint& rho) const { return eval_complex_(ComplexPhasePoint(rho)); }
  complex eval_complex(const ComplexPhasePoint& rho) const { return eval_complex_(rho); }

  /// (dp/dx_1..dp/dx_n, dp/dxi_1..dp/dxi_n)
  std::vector<complex> grad(const PhasePoint& rho) const {
    auto g = grad_(rho);
    for (const auto& v : g)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
        throw EvaluationError("symbol '" + name_ + "': non-finite gradient");
    return g;
  }

  bool periodic(std::size_t j) const noexcept { return j < periodic_.size() && periodic_[j]; }
  const std::vector<bool>& periodic_flags() const noexcept { return periodic_; }
  /// Period of every periodic position coordinate.
  static constexpr double period = 2.0 * std::numbers::pi;

  const PhaseBox& box() const noexcept { return box_; }
  const ModelData& model() const noexcept { return model_; }

  /// Copy of this symbol restricted to a different phase-space box.
  Symbol with_box(PhaseBox box) const {
    Symbol s(*this);
    s.box_ = std::move(box);
    return s;
  }

 private:
  std::string name_;
  std::size_t dim_;
  ComplexEval eval_complex_;
  Gradient grad_;
  std::vector<bool> periodic_;
  PhaseBox box_;
  ModelData model_;
};

/// Parameters accepted by the built-in models.
struct SymbolParams {
  double amplitude = 1.0;               // a in g = i a cos x, V = a cos x, V(x) = a x^2/2 (kfp)
  double quartic = 0.0;                 // b in V(x) = a x^2/2 + b x^4/4 (kfp only)
  std::optional<complex> rotate_about;  // z0: p -> i (p - z0)
};

namespace detail {

inline PhaseBox circle_box() { return PhaseBox::uniform(1, 0.0, 2.0 * std::numbers::pi, -4.0, 4.0); }
inline PhaseBox line_box(std::size_t n) { return PhaseBox::uniform(n, -6.0, 6.0, -6.0, 6.0); }

inline void rotation(const SymbolParams& params, ModelData& m) {
  if (params.rotate_about) {
    m.prefactor = complex(0.0, 1.0);
    m.shift = *params.rotate_about;
  }
}

}  // namespace detail

/// p = xi + g(x) on T*S^1, default g = i cos x.
inline Symbol circle_advection(const TrigPolynomial& g, const SymbolParams& params = {}) {
  ModelData m;
  m.family = ModelData::Family::CircleAdvection;
  m.potential = g;
  detail::rotation(params, m);
  auto eval = [g, m](const ComplexPhasePoint& r) { return m.prefactor * (r.xi[0] + g(r.x[0]) - m.shift); };
  auto grad = [g, m](const PhasePoint& r) {
    return std::vector<complex>{m.prefactor * g.derivative(r.x[0]), m.prefactor};
  };
  return Symbol("circle-advection", 1, eval, grad, {true}, detail::circle_box(), m);
}

inline Symbol circle_advection(const SymbolParams& params = {}) {
  return circle_advection(TrigPolynomial::cosine(complex(0.0, params.amplitude)), params);
}

/// p = xi^2 + i V(x) on T*S^1, default V = cos x.
inline Symbol torus_schrodinger(const TrigPolynomial& V, const SymbolParams& params = {}) {
  ModelData m;
  m.family = ModelData::Family::TorusSchrodinger;
  m.potential = V;
  detail::rotation(params, m);
  const complex I(0.0, 1.0);
  auto eval = [V, m, I](const ComplexPhasePoint& r) {
    return m.prefactor * (r.xi[0] * r.xi[0] + I * V(r.x[0]) - m.shift);
  };
  auto grad = [V, m, I](const PhasePoint& r) {
    return std::vector<complex>{m.prefactor * I * V.derivative(r.x[0]), m.prefactor * 2.0 * r.xi[0]};
  };
  return Symbol("torus-schrodinger", 1, eval, grad, {true}, detail::circle_box(), m);
}

inline Symbol torus_schrodinger(const SymbolParams& params = {}) {
  return torus_schrodinger(TrigPolynomial::cosine(params.amplitude), params);
}

/// p = xi^2 + i a x^2 on T*R, the symbol of -h^2 d^2/dx^2 + i x^2.
inline Symbol nsa_harmonic(const SymbolParams& params = {}) {
  ModelData m;
  m.family = ModelData::Family::HarmonicOscillator;
  detail::rotation(params, m);
  const complex I(0.0, 1.0);
  const double a = params.amplitude;
  auto eval = [m, I, a](const ComplexPhasePoint& r) {
    return m.prefactor * (r.xi[0] * r.xi[0] + I * a * r.x[0] * r.x[0] - m.shift);
  };
  auto grad = [m, I, a](const PhasePoint& r) {
    return std::vector<complex>{m.prefactor * 2.0 * I * a * r.x[0], m.prefactor * 2.0 * r.xi[0]};
  };
  return Symbol("nsa-harmonic", 1, eval, grad, {false}, detail::line_box(1), m);
}

/// Kramers-Fokker-Planck symbol on T*R^2 with coordinates (x, y; xi, eta):
/// p = i (y xi - V'(x) eta) + (y^2 + eta^2)/2,  V(x) = a x^2/2 + b x^4/4.
inline Symbol kramers_fokker_planck(const SymbolParams& params = {}) {
  ModelData m;
  m.family = ModelData::Family::KramersFokkerPlanck;
  detail::rotation(params, m);
  const complex I(0.0, 1.0);
  const double a = params.amplitude, b = params.quartic;
  auto dV = [a, b](complex x) { return a * x + b * x * x * x; };
  auto d2V = [a, b](complex x) { return a + 3.0 * b * x * x; };
  auto eval = [m, I, dV](const ComplexPhasePoint& r) {
    const complex x = r.x[0], y = r.x[1], xi = r.xi[0], eta = r.xi[1];
    return m.prefactor * (I * (y * xi - dV(x) * eta) + 0.5 * (y * y + eta * eta) - m.shift);
  };
  auto grad = [m, I, dV, d2V](const PhasePoint& r) {
    const double x = r.x[0], y = r.x[1], xi = r.xi[0], eta = r.xi[1];
    return std::vector<complex>{m.prefactor * (-I * d2V(x) * eta), m.prefactor * (I * xi + y),
                                m.prefactor * (I * y), m.prefactor * (-I * dV(x) + eta)};
  };
  return Symbol("kfp", 2, eval, grad, {false, false}, detail::line_box(2), m);
}

/// p = c everywhere.
inline Symbol constant_symbol(complex c, std::size_t dim = 1) {
  auto eval = [c](const ComplexPhasePoint&) { return c; };
  auto grad = [dim](const PhasePoint&) { return std::vector<complex>(2 * dim, 0.0); };
  return Symbol("constant", dim, eval, grad, std::vector<bool>(dim, false), detail::line_box(dim));
}

struct ModelInfo {
  std::string name;
  std::string description;
};

inline const std::vector<ModelInfo>& model_catalog() {
  static const std::vector<ModelInfo> catalog = {
      {"circle-advection", "p = xi + i a cos x on T*S^1 (operator hD + i a cos x, Fourier basis)"},
      {"nsa-harmonic", "p = xi^2 + i a x^2 on T*R (operator -d^2/dy^2 + i y^2, Hermite basis)"},
      {"torus-schrodinger", "p = xi^2 + i a cos x on T*S^1 (operator -h^2 d^2 + i a cos x, Fourier basis)"},
      {"kfp", "Kramers-Fokker-Planck symbol i(y xi - V'(x) eta) + (y^2 + eta^2)/2 on T*R^2 (symbol only)"},
  };
  return catalog;
}

/// Registry lookup by name.
inline Symbol make_symbol(const std::string& name, const SymbolParams& params = {}) {
  if (name == "circle-advection") return circle_advection(params);
  if (name == "torus-schrodinger") return torus_schrodinger(params);
  if (name == "nsa-harmonic") return nsa_harmonic(params);
  if (name == "kfp") return kramers_fokker_planck(params);
  throw ArgumentError("unknown model '" + name + "'");
}

}  // namespace sspc

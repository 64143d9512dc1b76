#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sspc/errors.hpp"
#include "sspc/io.hpp"
#include "sspc/symbol.hpp"

namespace sspc {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Basis { FourierCircle, HermiteLine, FourierTorus, Dense };

inline const char* basis_name(Basis b) {
  switch (b) {
    case Basis::FourierCircle: return "fourier-circle";
    case Basis::HermiteLine: return "hermite-line";
    case Basis::FourierTorus: return "fourier-torus";
    case Basis::Dense: return "dense";
  }
  return "dense";
}

/// Dense N x N matrix of a model operator at semiclassical parameter h.
///
/// Fourier bases index modes n_min .. n_min + N - 1; the Hermite basis indexes
/// Hermite functions 0 .. N - 1.
struct DiscretizedOperator {
  Matrix matrix;
  double h = 1.0;
  std::string model = "dense";
  Basis basis = Basis::Dense;
  int n_min = 0;
  std::optional<complex> rotated_about;

  Eigen::Index size() const noexcept { return matrix.rows(); }

  /// Wraps an arbitrary square matrix (any size) for the spectral routines.
  static DiscretizedOperator dense(Matrix m, double h = 1.0) {
    if (m.rows() != m.cols() || m.rows() == 0) throw ArgumentError("dense operator must be square and non-empty");
    if (!m.allFinite()) throw EvaluationError("dense operator has non-finite entries");
    DiscretizedOperator op;
    op.matrix = std::move(m);
    op.h = h;
    return op;
  }
};

namespace detail {

inline void check_fourier_size(double h, int N) {
  if (!(h > 0.0) || !std::isfinite(h)) throw ArgumentError("h must be positive and finite");
  if (N < 16 || N % 2 != 0) throw ArgumentError("N must be even and >= 16");
  if (N > 4096) throw ArgumentError("N must be <= 4096");
}

/// Toeplitz matrix of multiplication by a trigonometric polynomial on modes -N/2 .. N/2 - 1.
inline Matrix multiplication_matrix(const TrigPolynomial& g, int N) {
  Matrix T = Matrix::Zero(N, N);
  const int d = g.degree();
  for (int r = 0; r < N; ++r)
    for (int c = std::max(0, r - d); c <= std::min(N - 1, r + d); ++c) T(r, c) = g.coefficient(r - c);
  return T;
}

inline void rotate(DiscretizedOperator& op, std::optional<complex> z0) {
  if (!z0) return;
  const Eigen::Index N = op.size();
  op.matrix = complex(0.0, 1.0) * (op.matrix - *z0 * Matrix::Identity(N, N));
  op.rotated_about = z0;
}

}  // namespace detail

/// hD + g(x) on the circle in the Fourier basis; with z0 set, returns i(A - z0 I).
inline DiscretizedOperator build_circle_model(const TrigPolynomial& g, double h, int N,
                                              std::optional<complex> rotate_about = {}) {
  detail::check_fourier_size(h, N);
  DiscretizedOperator op;
  op.model = "circle-advection";
  op.basis = Basis::FourierCircle;
  op.h = h;
  op.n_min = -N / 2;
  op.matrix = detail::multiplication_matrix(g, N);
  for (int r = 0; r < N; ++r) op.matrix(r, r) += h * (op.n_min + r);
  detail::rotate(op, rotate_about);
  return op;
}

/// -h^2 d^2/dx^2 + i V(x) on the circle in the Fourier basis.
inline DiscretizedOperator build_torus_schrodinger(const TrigPolynomial& V, double h, int N,
                                                   std::optional<complex> rotate_about = {}) {
  detail::check_fourier_size(h, N);
  DiscretizedOperator op;
  op.model = "torus-schrodinger";
  op.basis = Basis::FourierTorus;
  op.h = h;
  op.n_min = -N / 2;
  op.matrix = complex(0.0, 1.0) * detail::multiplication_matrix(V, N);
  for (int r = 0; r < N; ++r) {
    const double hn = h * (op.n_min + r);
    op.matrix(r, r) += hn * hn;
  }
  detail::rotate(op, rotate_about);
  return op;
}

/// Q = -d^2/dy^2 + i y^2 in the Hermite-function basis (h = 1).
inline DiscretizedOperator build_hermite_oscillator(int N) {
  if (N < 32 || N > 4096) throw ArgumentError("build_hermite_oscillator: N must lie in [32, 4096]");
  DiscretizedOperator op;
  op.model = "nsa-harmonic";
  op.basis = Basis::HermiteLine;
  op.h = 1.0;
  op.matrix = Matrix::Zero(N, N);
  const complex c(-1.0, 1.0);
  for (int n = 0; n < N; ++n) {
    op.matrix(n, n) = (2.0 * n + 1.0) + c * (n + 0.5);
    if (n + 2 < N) {
      const double y2 = std::sqrt((n + 1.0) * (n + 2.0)) / 2.0;
      op.matrix(n, n + 2) = c * y2;
      op.matrix(n + 2, n) = c * y2;
    }
  }
  return op;
}

/// Discretization of a registry symbol; the symbol's own rotation is carried over.
inline DiscretizedOperator build_from_symbol(const Symbol& sym, double h, int N) {
  const auto& m = sym.model();
  std::optional<complex> z0;
  if (m.prefactor != complex(1.0)) {
    if (m.prefactor != complex(0.0, 1.0)) throw UnsupportedModel("only the rotation p -> i(p - z0) is discretized");
    z0 = m.shift;
  }
  switch (m.family) {
    case ModelData::Family::CircleAdvection: return build_circle_model(m.potential, h, N, z0);
    case ModelData::Family::TorusSchrodinger: return build_torus_schrodinger(m.potential, h, N, z0);
    case ModelData::Family::HarmonicOscillator: {
      if (z0) throw UnsupportedModel("the Hermite oscillator is built unrotated");
      return build_hermite_oscillator(N);
    }
    default: throw UnsupportedModel("model '" + sym.name() + "' has no operator discretization");
  }
}

/// Eigenvalues with a residual bound from a sample of eigenpairs.
struct SpectrumResult {
  std::vector<complex> eigenvalues;  // sorted by modulus, then argument
  double residual = 0.0;
};

inline SpectrumResult spectrum(const DiscretizedOperator& op) {
  const Eigen::Index N = op.size();
  if (N > 4096) throw ArgumentError("spectrum: N must be <= 4096");
  Eigen::ComplexEigenSolver<Matrix> es(op.matrix, true);
  if (es.info() != Eigen::Success) {
    const double rcond = Eigen::PartialPivLU<Matrix>(op.matrix).rcond();
    throw ConvergenceError("spectrum: eigensolver did not converge (reciprocal condition estimate " + io::fmt(rcond) +
                           ")");
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(N));
  for (Eigen::Index i = 0; i < N; ++i) order[static_cast<std::size_t>(i)] = i;
  const auto& ev = es.eigenvalues();
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const double ma = std::abs(ev(a)), mb = std::abs(ev(b));
    if (ma != mb) return ma < mb;
    return std::arg(ev(a)) < std::arg(ev(b));
  });
  SpectrumResult out;
  for (auto i : order) out.eigenvalues.push_back(ev(i));
  const int samples = static_cast<int>(std::min<Eigen::Index>(10, N));
  for (int s = 0; s < samples; ++s) {
    const Eigen::Index pick = order[static_cast<std::size_t>(samples == 1 ? 0 : s * (N - 1) / (samples - 1))];
    const Vector v = es.eigenvectors().col(pick);
    const double r = (op.matrix * v - ev(pick) * v).norm() / v.norm();
    out.residual = std::max(out.residual, r);
  }
  return out;
}

/// Smallest eigenvalue of the Hermitian part (A + A*)/2, i.e. min Re <Au, u> over unit u.
inline double numerical_range_left_edge(const DiscretizedOperator& op) {
  const Matrix H = 0.5 * (op.matrix + op.matrix.adjoint());
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// min Re <Au, u> over `probes` random unit vectors drawn from a seeded generator.
inline double accretivity_probe(const DiscretizedOperator& op, int probes = 64, std::uint64_t seed = 1) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  double lowest = std::numeric_limits<double>::infinity();
  for (int p = 0; p < probes; ++p) {
    Vector u(op.size());
    for (Eigen::Index i = 0; i < u.size(); ++i) {
      const double re = gauss(rng), im = gauss(rng);
      u(i) = complex(re, im);
    }
    u.normalize();
    lowest = std::min(lowest, u.dot(op.matrix * u).real());
  }
  return lowest;
}

/// Binary matrix file: "SSPC", u32 N, f64 h, then N^2 (re, im) f64 pairs row-major, little-endian.
inline void write_matrix_binary(const std::filesystem::path& path, const DiscretizedOperator& op) {
  static_assert(std::endian::native == std::endian::little, "binary export assumes a little-endian host");
  auto out = io::open_out(path);
  const std::uint32_t N = static_cast<std::uint32_t>(op.size());
  out.write("SSPC", 4);
  out.write(reinterpret_cast<const char*>(&N), sizeof N);
  out.write(reinterpret_cast<const char*>(&op.h), sizeof op.h);
  for (Eigen::Index r = 0; r < op.size(); ++r)
    for (Eigen::Index c = 0; c < op.size(); ++c) {
      const double pair[2] = {op.matrix(r, c).real(), op.matrix(r, c).imag()};
      out.write(reinterpret_cast<const char*>(pair), sizeof pair);
    }
  out.close();
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

inline DiscretizedOperator read_matrix_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  char magic[4];
  std::uint32_t N = 0;
  double h = 0.0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&N), sizeof N);
  in.read(reinterpret_cast<char*>(&h), sizeof h);
  if (!in || std::memcmp(magic, "SSPC", 4) != 0) throw Error("'" + path.string() + "' is not an SSPC matrix file");
  Matrix m(N, N);
  for (std::uint32_t r = 0; r < N; ++r)
    for (std::uint32_t c = 0; c < N; ++c) {
      double pair[2];
      in.read(reinterpret_cast<char*>(pair), sizeof pair);
      m(r, c) = complex(pair[0], pair[1]);
    }
  if (!in) throw Error("'" + path.string() + "' is truncated");
  return DiscretizedOperator::dense(std::move(m), h);
}

/// Spectrum export: columns re, im.
inline void write_spectrum_csv(const std::filesystem::path& path, const std::vector<complex>& eigenvalues) {
  io::CsvWriter csv(path, {"re", "im"});
  for (const auto& z : eigenvalues) csv.row({z.real(), z.imag()});
  csv.close();
}

}  // namespace sspc

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "sspc/operators.hpp"

using namespace sspc;
using std::numbers::pi;

namespace {

const TrigPolynomial kICos = TrigPolynomial::cosine(complex(0.0, 1.0));

double distance_to(const std::vector<complex>& set, complex z) {
  double d = 1e300;
  for (auto w : set) d = std::min(d, std::abs(w - z));
  return d;
}

}  // namespace

TEST(CircleModel, FreeAdvectionIsDiagonal) {
  const double h = 1.0 / 32;
  const auto op = build_circle_model(TrigPolynomial::zero(), h, 64);
  for (int r = 0; r < 64; ++r)
    for (int c = 0; c < 64; ++c) EXPECT_EQ(op.matrix(r, c), r == c ? complex(h * (r - 32)) : complex(0.0));
  const auto sp = spectrum(op);
  for (int n = -32; n < 32; ++n) EXPECT_LT(distance_to(sp.eigenvalues, h * n), 1e-14);
}

TEST(CircleModel, QuantizationConditionAtModerateH) {
  // eigenvalues h n + mean(g); at h = 1/4 the eigenvalue condition number is ~e^{2/h} ~ 3e3
  const auto sp = spectrum(build_circle_model(kICos, 0.25, 64));
  for (int n = -8; n <= 8; ++n) EXPECT_LT(distance_to(sp.eigenvalues, 0.25 * n), 1e-8) << n;
}

TEST(CircleModel, BackwardStableAtSmallH) {
  // at h = 1/32 the eigenvalues are exponentially ill-conditioned; only the residual is meaningful
  const auto sp = spectrum(build_circle_model(kICos, 1.0 / 32, 128));
  EXPECT_EQ(sp.eigenvalues.size(), 128u);
  EXPECT_LE(sp.residual, 1e-8);
}

TEST(CircleModel, RotatedBuildIsAccretive) {
  const auto op = build_circle_model(kICos, 1.0 / 32, 128, complex(0.0, 1.0));
  EXPECT_GE(accretivity_probe(op, 200, 11), -1e-10);
  EXPECT_GE(numerical_range_left_edge(op), -1e-10);
  ASSERT_TRUE(op.rotated_about.has_value());
}

TEST(CircleModel, BandedByDegree) {
  const TrigPolynomial g({0.1, complex(0, 0.2), 0.0, complex(0, 0.2), 0.1});  // degree 2
  const auto op = build_circle_model(g, 0.1, 32);
  for (int r = 0; r < 32; ++r)
    for (int c = 0; c < 32; ++c)
      if (std::abs(r - c) > 2) EXPECT_EQ(op.matrix(r, c), complex(0.0));
  EXPECT_EQ(op.matrix(5, 3), complex(0.1));
}

TEST(CircleModel, Validation) {
  EXPECT_THROW(build_circle_model(kICos, 0.1, 15), ArgumentError);
  EXPECT_THROW(build_circle_model(kICos, 0.1, 8), ArgumentError);
  EXPECT_THROW(build_circle_model(kICos, -0.1, 32), ArgumentError);
  EXPECT_THROW(build_from_symbol(kramers_fokker_planck(), 0.1, 32), UnsupportedModel);
  EXPECT_THROW(build_from_symbol(constant_symbol(1.0), 0.1, 32), UnsupportedModel);
}

TEST(CircleModel, FromSymbolCarriesRotation) {
  SymbolParams p;
  p.rotate_about = complex(0.0, 1.0);
  const auto a = build_from_symbol(circle_advection(p), 1.0 / 16, 32);
  const auto b = build_circle_model(kICos, 1.0 / 16, 32, complex(0.0, 1.0));
  EXPECT_EQ((a.matrix - b.matrix).norm(), 0.0);
}

TEST(HermiteOscillator, LowestEigenvalues) {
  const auto sp = spectrum(build_hermite_oscillator(200));
  const complex rot = std::exp(complex(0.0, pi / 4));
  EXPECT_NEAR(std::abs(sp.eigenvalues[0] - rot), 0.0, 1e-6);
  EXPECT_NEAR(sp.eigenvalues[0].real(), 0.70710678118654757, 1e-6);
  EXPECT_NEAR(sp.eigenvalues[5].real(), 7.7781745930520225, 1e-6);
  EXPECT_NEAR(sp.eigenvalues[5].imag(), 7.7781745930520225, 1e-6);
  for (int n = 0; n < 10; ++n) EXPECT_LT(std::abs(sp.eigenvalues[n] - (2.0 * n + 1.0) * rot), 1e-6) << n;
}

TEST(HermiteOscillator, TruncationConvergence) {
  const auto a = spectrum(build_hermite_oscillator(200)), b = spectrum(build_hermite_oscillator(400));
  for (int n = 0; n < 10; ++n) EXPECT_LT(std::abs(a.eigenvalues[n] - b.eigenvalues[n]), 1e-8) << n;
}

TEST(HermiteOscillator, ComplexSymmetric) {
  const auto op = build_hermite_oscillator(64);
  EXPECT_EQ((op.matrix - op.matrix.transpose()).norm(), 0.0);
  EXPECT_THROW(build_hermite_oscillator(16), ArgumentError);
}

TEST(TorusSchrodinger, FreeCase) {
  const double h = 1.0 / 16;
  const auto op = build_torus_schrodinger(TrigPolynomial::zero(), h, 32);
  const auto sp = spectrum(op);
  for (int n = -16; n < 16; ++n) EXPECT_LT(distance_to(sp.eigenvalues, h * h * n * n), 1e-14);
}

TEST(TorusSchrodinger, EigenvaluesInsideSampledRange) {
  const auto op = build_torus_schrodinger(TrigPolynomial::cosine(1.0), 1.0 / 16, 128);
  const auto sp = spectrum(op);
  for (auto z : sp.eigenvalues) {
    EXPECT_GE(z.real(), -1e-8);
    EXPECT_LE(z.real(), 16.0 + 1e-8);
    EXPECT_LE(std::abs(z.imag()), 1.0 + 1e-8);
  }
  EXPECT_GE(accretivity_probe(op, 100, 3), -1e-10);
  EXPECT_LE(sp.residual, 1e-8);
}

TEST(Spectrum, DiagonalInput) {
  Matrix m = Matrix::Zero(3, 3);
  m(0, 0) = 2.0, m(1, 1) = complex(0, 1), m(2, 2) = -3.0;
  const auto sp = spectrum(DiscretizedOperator::dense(m));
  ASSERT_EQ(sp.eigenvalues.size(), 3u);
  EXPECT_EQ(sp.eigenvalues[0], complex(0, 1));
  EXPECT_EQ(sp.eigenvalues[1], complex(2.0));
  EXPECT_EQ(sp.eigenvalues[2], complex(-3.0));
  EXPECT_EQ(sp.residual, 0.0);
}

TEST(MatrixExport, BinaryRoundTrip) {
  const auto op = build_circle_model(kICos, 0.125, 16, complex(0.0, 1.0));
  const auto path = std::filesystem::temp_directory_path() / "sspc_matrix_test.bin";
  write_matrix_binary(path, op);
  EXPECT_EQ(std::filesystem::file_size(path), 4u + 4u + 8u + 16u * 16u * 16u);
  std::ifstream raw(path, std::ios::binary);
  char magic[4];
  raw.read(magic, 4);
  EXPECT_EQ(std::string(magic, 4), "SSPC");
  const auto back = read_matrix_binary(path);
  EXPECT_EQ(back.h, 0.125);
  EXPECT_EQ((back.matrix - op.matrix).norm(), 0.0);
  std::filesystem::remove(path);
}

TEST(MatrixExport, SpectrumCsv) {
  const auto path = std::filesystem::temp_directory_path() / "sspc_spectrum_test.csv";
  write_spectrum_csv(path, {complex(1.5, -2.0), complex(0.1, 0.0)});
  std::ifstream in(path);
  std::string a, b, c;
  std::getline(in, a), std::getline(in, b), std::getline(in, c);
  EXPECT_EQ(a, "re,im");
  EXPECT_EQ(b, "1.5,-2");
  EXPECT_EQ(c, "0.10000000000000001,0");
  std::filesystem::remove(path);
}

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "sspc/hjb.hpp"

using namespace sspc;
using std::numbers::pi;

namespace {

Symbol rotated_circle() {
  SymbolParams p;
  p.rotate_about = complex(0.0, 1.0);
  return circle_advection(p);
}

// G_t solves pure transport for (1 - cos y) + i eta: G_t(y) = -int_{y-t}^{y} (1 - cos s) ds
double exact_G(double t, double y) { return -(t - std::sin(y) + std::sin(y - t)); }

PhaseLattice central_lattice(int n = 128) { return PhaseLattice::make(-pi, pi, n, -4.0, 4.0, n, true); }

std::vector<PhasePoint> central_orbit() {
  return flow(rotated_circle(), Part::Imag, {-0.5, 0.0}, 1.0, 100);
}

double orbit_error(const PhaseLattice& L, const std::vector<WeightField>& fields) {
  double worst = 0.0;
  for (const auto& f : fields)
    for (double y = -0.5; y <= 0.5 + 1e-12; y += 0.05)
      worst = std::max(worst, std::abs(interpolate(L, f, {y, 0.0}) - exact_G(f.t, y)));
  return worst;
}

}  // namespace

TEST(PhaseLattice, Validation) {
  EXPECT_THROW(PhaseLattice::make(0, 1, 8, 0, 1, 32, false), ArgumentError);
  const auto L = PhaseLattice::make(-pi, pi, 64, -1.0, 1.0, 17, true);
  EXPECT_NEAR(L.x_step, 2 * pi / 64, 1e-15);
  EXPECT_NEAR(L.xi_step, 0.125, 1e-15);
  EXPECT_TRUE(L.contains({10.0, 0.0}));
  EXPECT_FALSE(L.contains({0.0, 1.5}));
}

TEST(WeightForcing, ZeroFieldGivesRealPart) {
  const auto L = central_lattice(32);
  const auto s = torus_schrodinger();
  const std::vector<std::array<double, 2>> zero(L.size(), {0.0, 0.0});
  const auto f = weight_forcing(s, L, zero);
  for (int i = 0; i < L.x_count; i += 5)
    for (int j = 0; j < L.xi_count; j += 3) EXPECT_EQ(f[L.index(i, j)], s.eval({L.x(i), L.xi(j)}).real());
}

TEST(EvolveG, FirstStepIsMinusDtRealPart) {
  // with a constant symbol the midpoint stage sees no gradient and the step is exact
  const auto L = central_lattice(32);
  const auto fields = evolve_G(constant_symbol(complex(0.7, 0.0)), L, 0.1, 0.1);
  ASSERT_EQ(fields.size(), 2u);
  for (double g : fields[1].values) EXPECT_DOUBLE_EQ(g, -0.1 * 0.7);
  // generic symbol: -dt Re p up to the O(dt^2) midpoint correction
  const auto s = rotated_circle();
  const double dt = 0.005;
  const auto g = evolve_G(s, L, dt, dt);
  for (int i = 0; i < L.x_count; ++i) {
    const double re = s.eval({L.x(i), 0.0}).real();
    EXPECT_NEAR(g[1].values[L.index(i, 16)], -dt * re, dt * dt);
  }
}

TEST(EvolveG, ZeroRealPartKeepsZero) {
  const auto L = central_lattice(32);
  const auto fields = evolve_G(constant_symbol(complex(0.0, 3.0)), L, 0.5, 0.05);
  for (const auto& f : fields)
    for (double g : f.values) EXPECT_EQ(g, 0.0);
}

TEST(EvolveG, NonpositiveAndNonincreasing) {
  const auto L = central_lattice(64);
  const auto torus_lattice = PhaseLattice::make(-pi, pi, 64, -1.5, 1.5, 64, true);
  for (const auto& [s, L] : {std::pair{rotated_circle(), L}, std::pair{torus_schrodinger(), torus_lattice}}) {
    const auto fields = evolve_G(s, L, 0.5, 0.25 * cfl_bound(s, L));
    EXPECT_EQ(fields.front().t, 0.0);
    EXPECT_NEAR(fields.back().t, 0.5, 1e-14);
    const double dt_h2 = fields[1].t * L.spacing() * L.spacing();
    for (std::size_t k = 1; k < fields.size(); ++k)
      for (std::size_t n = 0; n < L.size(); ++n) {
        EXPECT_LE(fields[k].values[n], 1e-10);
        // monotone in time up to the O(dt * spacing^2) truncation error of the scheme
        EXPECT_LE(fields[k].values[n], fields[k - 1].values[n] + dt_h2);
      }
  }
}

TEST(EvolveG, MatchesExactTransportSolution) {
  const auto L = central_lattice();
  const auto fields = evolve_G(rotated_circle(), L, 0.5, 0.0);
  EXPECT_LT(orbit_error(L, fields), 5 * L.spacing() * L.spacing());
}

TEST(EvolveG, OracleAgreementOnCentralOrbit) {
  const auto L = central_lattice();
  const auto s = rotated_circle();
  const auto fields = evolve_G(s, L, 0.5, 0.0);
  for (const auto& f : fields) {
    if (f.t == 0.0) continue;
    const auto end = flow(s, Part::Imag, {0.0, 0.0}, f.t, 50).back();
    const double g = interpolate(L, f, end), oracle = G_characteristic(s, {0.0, 0.0}, f.t);
    EXPECT_LE(std::abs(g - oracle), std::max(0.25 * std::abs(oracle), 5 * L.spacing() * L.spacing())) << f.t;
    if (f.t >= 0.1) {
      EXPECT_GE(-g / -oracle, 0.5) << f.t;
      EXPECT_LE(-g / -oracle, 2.0) << f.t;
    }
  }
}

TEST(EvolveG, TorusModelAgreesWithCharacteristics) {
  // xi^2 + i cos x around (pi/2, 0); the |grad G|^2 term makes the agreement approximate
  const auto L = PhaseLattice::make(-pi, pi, 128, -1.5, 1.5, 128, true);
  const auto s = torus_schrodinger();
  const auto fields = evolve_G(s, L, 0.5, 0.25 * cfl_bound(s, L));
  for (const auto& f : fields) {
    if (f.t < 0.1) continue;
    const auto end = flow(s, Part::Imag, {pi / 2, 0.0}, f.t, 50).back();
    const double g = interpolate(L, f, end), oracle = G_characteristic(s, {pi / 2, 0.0}, f.t);
    EXPECT_GE(g / oracle, 0.5) << f.t;
    EXPECT_LE(g / oracle, 2.0) << f.t;
  }
}

TEST(EvolveG, GridRefinementReducesDisagreement) {
  const auto s = rotated_circle();
  const auto coarse = central_lattice(32), fine = central_lattice(64);
  const double e1 = orbit_error(coarse, evolve_G(s, coarse, 0.5, 0.02));
  const double e2 = orbit_error(fine, evolve_G(s, fine, 0.5, 0.01));
  EXPECT_GE(e1 / e2, 2.0);
}

TEST(EvolveG, RejectsCflViolationAndBadTime) {
  const auto L = central_lattice(32);
  EXPECT_THROW(evolve_G(rotated_circle(), L, 0.5, 0.1), ArgumentError);
  EXPECT_THROW(evolve_G(rotated_circle(), L, 1.5, 0.0), ArgumentError);
}

TEST(EvolveG, GrowingCourantNumberIsReported) {
  // on xi in [-4, 4] the speed cosh(dG/dxi) of the torus symbol outgrows the initial bound
  const auto L = PhaseLattice::make(-pi, pi, 64, -4.0, 4.0, 64, true);
  EXPECT_THROW(evolve_G(torus_schrodinger(), L, 1.0, 0.0), ConvergenceError);
}

TEST(EvolveG, NegativeRealPartIsReported) {
  const auto L = central_lattice(32);
  EXPECT_THROW(evolve_G(constant_symbol(complex(-1.0, 0.0)), L, 0.1, 0.05), AssumptionViolation);
}

TEST(GCharacteristic, Examples) {
  const auto s = rotated_circle();
  EXPECT_NEAR(G_characteristic(s, {0.0, 0.0}, 1.0), -0.15852901519210349, 1e-10);
  EXPECT_EQ(G_characteristic(s, {0.0, 0.0}, 0.0), 0.0);
  // xi^2 + i cos x from (pi/2, 0): xi(t) = t, so J = t^3/3
  EXPECT_NEAR(G_characteristic(torus_schrodinger(), {pi / 2, 0.0}, 0.2), -0.0026666666666666666, 1e-12);
  EXPECT_THROW(G_characteristic(s, {0.0, 0.0}, 1.5), ArgumentError);
}

TEST(CertifyDecay, SyntheticCube) {
  const auto L = central_lattice(16);
  std::vector<WeightField> fields;
  for (int s = 0; s <= 50; ++s) {
    const double t = 0.01 * s;
    fields.push_back({t, std::vector<double>(L.size(), -t * t * t / 6.0), {}});
  }
  const auto c = certify_decay(L, fields, 2, {{0.0, 0.0}});
  EXPECT_NEAR(c.fit.exponent, 3.0, 0.01);
  EXPECT_NEAR(c.C, 6.0, 1e-9);
  EXPECT_TRUE(c.consistent);
}

TEST(CertifyDecay, LinearFieldIsFlagged) {
  const auto L = central_lattice(16);
  std::vector<WeightField> fields;
  for (int s = 0; s <= 50; ++s) fields.push_back({0.01 * s, std::vector<double>(L.size(), -0.01 * s), {}});
  const auto c = certify_decay(L, fields, 2, {{0.0, 0.0}});
  EXPECT_NEAR(c.fit.exponent, 1.0, 1e-9);
  EXPECT_FALSE(c.consistent);
}

TEST(CertifyDecay, NonnegativeFieldFails) {
  const auto L = central_lattice(16);
  std::vector<WeightField> fields;
  for (int s = 0; s <= 50; ++s) fields.push_back({0.01 * s, std::vector<double>(L.size(), 0.0), {}});
  EXPECT_THROW(certify_decay(L, fields, 2, {{0.0, 0.0}}), AssumptionViolation);
}

TEST(CertifyDecay, CircleModelExponent) {
  const auto L = central_lattice();
  const auto fields = evolve_G(rotated_circle(), L, 0.5, 0.0);
  const auto c = certify_decay(L, fields, 2, central_orbit());
  EXPECT_GE(c.fit.exponent, 2.7);
  EXPECT_LE(c.fit.exponent, 3.3);
  EXPECT_TRUE(c.consistent);
  // least decay is at y = t/2 where -G = t - 2 sin(t/2) ~ t^3/24
  EXPECT_NEAR(c.C, 24.0, 1.5);
}

TEST(WeightCsv, HeaderAndRows) {
  const auto L = central_lattice(16);
  const auto fields = evolve_G(rotated_circle(), L, 0.1, 0.0);
  const auto path = std::filesystem::temp_directory_path() / "sspc_weight_test.csv";
  write_weight_csv(path, L, fields, 2);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "t,x,xi,G");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, ((fields.size() + 1) / 2) * L.size());
  std::filesystem::remove(path);
}

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "sspc/hamiltonian.hpp"
#include "sspc/symbol.hpp"

using namespace sspc;
using std::numbers::pi;

namespace {

// p' = i(xi + i cos x - i) = (1 - cos x) + i xi
Symbol rotated_circle() {
  SymbolParams p;
  p.rotate_about = complex(0.0, 1.0);
  return circle_advection(p);
}

}  // namespace

TEST(Symbol, ComplexExtensionMatchesRealEvaluation) {
  for (const auto& name : {"circle-advection", "torus-schrodinger", "nsa-harmonic"}) {
    const auto s = make_symbol(name);
    for (double x : {-1.3, 0.2, 2.9})
      for (double xi : {-2.0, 0.0, 1.7}) {
        const PhasePoint r(x, xi);
        const complex a = s.eval(r), b = s.eval_complex(ComplexPhasePoint(complex(x), complex(xi)));
        EXPECT_LE(std::abs(a - b), 1e-14 * std::max(1.0, std::abs(a))) << name;
      }
  }
}

TEST(Symbol, GradientMatchesCentredDifferences) {
  SymbolParams params;
  params.quartic = 0.3;
  const auto kfp = kramers_fokker_planck(params);
  const PhasePoint r({0.4, -0.7}, {1.1, 0.3});
  const auto g = kfp.grad(r);
  const double e = 1e-5;
  auto st = r.stacked();
  for (std::size_t a = 0; a < st.size(); ++a) {
    auto up = st, dn = st;
    up[a] += e, dn[a] -= e;
    const complex fd = (kfp.eval(PhasePoint::from_stacked(up)) - kfp.eval(PhasePoint::from_stacked(dn))) / (2 * e);
    EXPECT_NEAR(std::abs(fd - g[a]), 0.0, 1e-8);
  }
  for (const auto& name : {"circle-advection", "torus-schrodinger", "nsa-harmonic"}) {
    const auto s = make_symbol(name);
    const PhasePoint q(0.9, -0.6);
    const auto gq = s.grad(q);
    const complex dx = (s.eval({0.9 + e, -0.6}) - s.eval({0.9 - e, -0.6})) / (2 * e);
    const complex dxi = (s.eval({0.9, -0.6 + e}) - s.eval({0.9, -0.6 - e})) / (2 * e);
    EXPECT_LT(std::abs(dx - gq[0]), 1e-8) << name;
    EXPECT_LT(std::abs(dxi - gq[1]), 1e-8) << name;
  }
}

TEST(Symbol, UnknownModelIsRejected) { EXPECT_THROW(make_symbol("nope"), ArgumentError); }

TEST(Symbol, TrigPolynomialNeedsOddCoefficientCount) {
  EXPECT_THROW(TrigPolynomial({1.0, 2.0}), ArgumentError);
}

TEST(HamiltonianField, CircleImaginaryPart) {
  const auto f = hamiltonian_field(circle_advection(), Part::Imag, {0.3, 0.0});
  EXPECT_NEAR(f[0], 0.0, 1e-15);
  EXPECT_NEAR(f[1], std::sin(0.3), 1e-15);
  EXPECT_NEAR(f[1], 0.29552020666133955, 1e-15);
}

TEST(HamiltonianField, CircleRealPart) {
  for (double x : {0.0, 1.0, 4.0}) {
    const auto f = hamiltonian_field(circle_advection(), Part::Real, {x, 0.7});
    EXPECT_DOUBLE_EQ(f[0], 1.0);
    EXPECT_DOUBLE_EQ(f[1], 0.0);
  }
}

TEST(HamiltonianField, TorusRealPart) {
  const auto f = hamiltonian_field(torus_schrodinger(), Part::Real, {0.0, 2.0});
  EXPECT_DOUBLE_EQ(f[0], 4.0);
  EXPECT_DOUBLE_EQ(f[1], 0.0);
}

TEST(Flow, RotatedCircleIsTranslation) {
  const auto path = flow(rotated_circle(), Part::Imag, {0.0, 0.0}, 1.0, 10);
  ASSERT_EQ(path.size(), 11u);
  EXPECT_NEAR(path.back().x[0], 1.0, 1e-14);
  EXPECT_NEAR(path.back().xi[0], 0.0, 1e-14);
}

TEST(Flow, ZeroTimeIsIdentity) {
  const PhasePoint r(0.7, -0.2);
  const auto path = flow(torus_schrodinger(), Part::Imag, r, 0.0, 4);
  EXPECT_EQ(path.back().x[0], r.x[0]);
  EXPECT_EQ(path.back().xi[0], r.xi[0]);
}

TEST(Flow, TorusRealPartMovesLinearly) {
  const auto path = flow(torus_schrodinger(), Part::Real, {0.5, 0.8}, 1.5, 7);
  EXPECT_NEAR(path.back().x[0], 0.5 + 2 * 0.8 * 1.5, 1e-13);
  EXPECT_NEAR(path.back().xi[0], 0.8, 1e-13);
}

TEST(Flow, FourthOrderConvergence) {
  // H_{Im p} of the quartic KFP symbol moves (x, y) as an anharmonic oscillator
  SymbolParams params;
  params.quartic = 1.0;
  const auto s = kramers_fokker_planck(params);
  const PhasePoint r({0.8, 0.0}, {0.3, 0.2});
  const double a = flow(s, Part::Imag, r, 1.0, 20).back().x[1];
  const double b = flow(s, Part::Imag, r, 1.0, 40).back().x[1];
  const double c = flow(s, Part::Imag, r, 1.0, 80).back().x[1];
  EXPECT_NEAR((a - b) / (b - c), 16.0, 1.5);
}

TEST(Flow, RealFlowConservesRealPart) {
  const auto s = kramers_fokker_planck();
  const PhasePoint r({0.3, 0.1}, {0.2, -0.4});
  const auto path = flow(s, Part::Real, r, 1.0, 200);
  const double e0 = s.eval(r).real();
  for (const auto& q : path) EXPECT_NEAR(s.eval(q).real(), e0, 1e-10);
}

TEST(Flow, EscapeReportsTime) {
  const auto s = torus_schrodinger().with_box(PhaseBox::uniform(1, 0.0, 2 * pi, -1.0, 1.0));
  try {
    flow(s, Part::Imag, {pi / 2, 0.0}, 2.0, 200);
    FAIL() << "expected a truncation report";
  } catch (const TruncationError& e) {
    // xi(t) = t at x = pi/2 leaves [-1, 1] at t = 1
    EXPECT_NEAR(e.escape_time(), 1.0, 0.011);
  }
}

TEST(Flow, RejectsBadArguments) {
  EXPECT_THROW(flow(circle_advection(), Part::Imag, {0.0, 0.0}, 1.0, 0), ArgumentError);
  EXPECT_THROW(flow(circle_advection(), Part::Imag, {0.0, 0.0}, NAN, 4), ArgumentError);
}

TEST(AccumulateJ, ClosedForm) {
  const auto s = rotated_circle();
  for (double t : {0.1, 0.5, 1.0}) EXPECT_NEAR(accumulate_J(s, {0.0, 0.0}, t), t - std::sin(t), 1e-10);
  EXPECT_NEAR(accumulate_J(s, {0.0, 0.0}, 1.0), 0.15852901519210349, 1e-10);
  EXPECT_EQ(accumulate_J(s, {0.0, 0.0}, 0.0), 0.0);
  const double j = accumulate_J(s, {0.0, 0.0}, 0.1);
  EXPECT_NEAR(j, 1.6658335317184487e-4, 1e-12);
  EXPECT_NEAR(j / (0.1 * 0.1 * 0.1 / 6.0), 1.0, 0.01);
}

TEST(AccumulateJ, NonnegativeAndNondecreasing) {
  for (const auto& s : {rotated_circle(), torus_schrodinger()}) {
    for (double x0 : {-1.0, 0.0, 0.4, 2.0}) {
      double prev = 0.0;
      for (double t = 0.05; t <= 1.0; t += 0.05) {
        const double j = accumulate_J(s, {x0, 0.0}, t);
        EXPECT_GE(j, 0.0);
        EXPECT_GE(j, prev - 1e-14);
        prev = j;
      }
    }
  }
}

TEST(AccumulateJ, NegativeRealPartIsAnAssumptionViolation) {
  // unrotated circle symbol: Re p = xi < 0 at xi = -1
  try {
    accumulate_J(circle_advection(), {0.0, -1.0}, 0.5);
    FAIL();
  } catch (const AssumptionViolation& e) {
    EXPECT_EQ(e.anchor(), "re.2");
  }
}

TEST(AccumulateJ, LowerBoundNearBoundaryPoint) {
  // min over a neighbourhood of J(t, rho)/t^3 stays away from zero for t in (0, 0.5]
  const auto s = rotated_circle();
  double lowest = 1e300;
  for (double x0 = -0.3; x0 <= 0.3 + 1e-12; x0 += 0.05)
    for (double t = 0.05; t <= 0.5 + 1e-12; t += 0.05)
      lowest = std::min(lowest, accumulate_J(s, {x0, 0.0}, t) / (t * t * t));
  EXPECT_GT(lowest, 1.0 / 30.0);
}

TEST(AccumulateJ, SmallTimeRatio) {
  const auto s = rotated_circle();
  for (double t = 0.02; t <= 0.3 + 1e-12; t += 0.02) {
    const double r = accumulate_J(s, {0.0, 0.0}, t) / (t * t * t);
    EXPECT_GE(r, 1.0 / 6.6);
    EXPECT_LE(r, 1.0 / 5.5);
  }
}

TEST(BracketOrder, RotatedCircle) {
  const auto c = bracket_order(rotated_circle(), {0.0, 0.0});
  EXPECT_EQ(c.order_k, 2);
  EXPECT_NEAR(c.coefficient, 1.0, 1e-6);
  ASSERT_EQ(c.probe_values.size(), 3u);
  EXPECT_LT(std::abs(c.probe_values[0]), 1e-6);
  EXPECT_LT(std::abs(c.probe_values[1]), 1e-6);
}

TEST(BracketOrder, TorusSchrodinger) {
  const auto c = bracket_order(torus_schrodinger(), {pi / 2, 0.0});
  EXPECT_EQ(c.order_k, 2);
  EXPECT_NEAR(c.coefficient, 2.0, 1e-6);
}

TEST(BracketOrder, ProbesMatchTimeDerivativesOfJ) {
  // d^{j+1}/dt^{j+1} J(0) = g^{(j)}(0); J(t) = t - sin t gives J''' (0) = 1.
  const auto s = rotated_circle();
  const auto c = bracket_order(s, {0.0, 0.0});
  const double e = 0.05;
  auto J = [&](double t) { return t >= 0 ? accumulate_J(s, {0.0, 0.0}, t) : -accumulate_J(s, {t, 0.0}, -t); };
  const double third = (J(2 * e) - 2 * J(e) + 2 * J(-e) - J(-2 * e)) / (2 * e * e * e);
  EXPECT_NEAR(third, c.coefficient, 5e-3);
}

TEST(BracketOrder, FlatCaseExceedsMaximum) {
  const auto s = constant_symbol(complex(0.0, 2.0));
  try {
    bracket_order(s, {0.0, 0.0});
    FAIL();
  } catch (const AssumptionViolation& e) {
    EXPECT_NE(std::string(e.what()).find("exceeds j_max"), std::string::npos);
  }
}

TEST(BracketOrder, NonzeroRealPartIsRejected) {
  EXPECT_THROW(bracket_order(rotated_circle(), {1.0, 0.0}), AssumptionViolation);
}

TEST(BracketOrder, KramersFokkerPlanckOrderTwo) {
  // at y = eta = 0 the only nonzero bracket is H_{Im p}^2 Re p = (xi^2 + V'(x)^2)
  const auto s = kramers_fokker_planck();
  const auto c = bracket_order(s, PhasePoint({0.5, 0.0}, {0.8, 0.0}));
  EXPECT_EQ(c.order_k, 2);
  EXPECT_NEAR(c.coefficient, 0.8 * 0.8 + 0.5 * 0.5, 1e-5);
}

TEST(RotationAngle, Examples) {
  EXPECT_NEAR(rotation_angle(circle_advection(), complex(0.0, 1.0), {0.0, 0.0}), 0.0, 1e-15);
  const double x1 = 1.1;
  EXPECT_NEAR(rotation_angle(torus_schrodinger(), complex(0.0, std::cos(x1)), {x1, 0.0}), pi / 2, 1e-15);
  EXPECT_THROW(rotation_angle(torus_schrodinger(), complex(0.0, 1.0), {0.0, 0.0}), ArgumentError);
}

TEST(RotationAngle, ResidualImaginaryPartIsSmall) {
  const auto s = torus_schrodinger();
  for (double x1 : {0.3, 1.2, 2.5, 4.0}) {
    const PhasePoint r(x1, 0.0);
    const double th = rotation_angle(s, s.eval(r), r);
    EXPECT_GE(th, 0.0);
    EXPECT_LT(th, pi);
    const auto g = s.grad(r);
    double gmax = 0.0, worst = 0.0;
    for (const auto& v : g) {
      gmax = std::max(gmax, std::abs(v));
      worst = std::max(worst, std::abs((std::exp(complex(0.0, -th)) * v).imag()));
    }
    EXPECT_LE(worst, 1e-8 * gmax);
  }
}

TEST(RotationAngle, NoRotationExists) {
  // dp = (-i sin x, 1) has entries with different arguments
  const PhasePoint r(pi / 2, 0.0);
  EXPECT_THROW(rotation_angle(circle_advection(), circle_advection().eval(r), r), AssumptionViolation);
}

TEST(PoissonBracket, Examples) {
  EXPECT_NEAR(poisson_bracket_self(circle_advection(), {pi / 2, 0.0}), 2.0, 1e-14);
  auto real_sym = torus_schrodinger(TrigPolynomial::zero());
  EXPECT_EQ(poisson_bracket_self(real_sym, {0.4, 1.2}), 0.0);
  EXPECT_NEAR(poisson_bracket_self(nsa_harmonic(), {1.0, -1.0}), 8.0, 1e-14);
}

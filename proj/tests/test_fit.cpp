#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "sspc/fit.hpp"

using namespace sspc;

TEST(FitPowerLaw, ExactCube) {
  std::vector<double> xs, ys;
  for (int i = 1; i <= 20; ++i) xs.push_back(0.1 * i), ys.push_back(std::pow(0.1 * i, 3));
  const auto f = fit_power_law(xs, ys, {0.0, 10.0});
  EXPECT_NEAR(f.exponent, 3.0, 1e-12);
  EXPECT_NEAR(f.constant, 1.0, 1e-12);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
  EXPECT_EQ(f.points, 20u);
}

TEST(FitPowerLaw, NoisyTwoThirds) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-0.01, 0.01);
  std::vector<double> xs, ys;
  for (int i = 0; i < 30; ++i) {
    const double x = std::pow(10.0, -3.0 + 3.0 * i / 29.0);
    xs.push_back(x);
    ys.push_back(2.0 * std::pow(x, 2.0 / 3.0) * (1.0 + u(rng)));
  }
  const auto f = fit_power_law(xs, ys, {0.0, 1.0});
  EXPECT_NEAR(f.exponent, 2.0 / 3.0, 0.02);
  EXPECT_NEAR(f.constant, 2.0, 0.1);
  EXPECT_GE(f.r_squared, 0.99);
  EXPECT_LE(f.r_squared, 1.0);
}

TEST(FitPowerLaw, WindowSelectsPoints) {
  std::vector<double> xs{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7}, ys;
  for (double x : xs) ys.push_back(x < 0.25 ? 1.0 : x * x);
  const auto f = fit_power_law(xs, ys, {0.25, 0.7});
  EXPECT_NEAR(f.exponent, 2.0, 1e-12);
  EXPECT_EQ(f.window[0], 0.25);
  EXPECT_EQ(f.window[1], 0.7);
}

TEST(FitPowerLaw, Errors) {
  EXPECT_THROW(fit_power_law({1, 2, 3}, {1, 2, 3}, {0, 10}), ArgumentError);
  EXPECT_THROW(fit_power_law({1, 2, 3, 4}, {1, 2, -3, 4}, {0, 10}), ArgumentError);
  EXPECT_THROW(fit_power_law({1, 2, 3, 4}, {1, 2, 3}, {0, 10}), ArgumentError);
  EXPECT_THROW(fit_power_law({1, 2, 3, 4}, {1, 2, 3, 4}, {5, 1}), ArgumentError);
}

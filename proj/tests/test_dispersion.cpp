#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "knudsen/dispersion.hpp"

using namespace knudsen;

namespace {

// lambda(z) straight from its Cauchy-integral definition (off-axis z only)
Complex lambda_by_quadrature(Complex z, double U) {
  auto f = [&](double mu) {
    return Complex(std::exp(-mu * mu) * q_minus_u(U, mu)) / (Complex(mu) - z);
  };
  const double br[] = {-12.0, z.real() - 1.0, z.real(), z.real() + 1.0, 12.0};
  const Complex I = integrate(f, std::span<const double>(br), {1e-14, 1e-13, 4000}).value;
  return 1.0 + (z + U) * inv_sqrt_pi * I;
}

}  // namespace

TEST(Lambda, SpecialValues) {
  for (double U : {-2.0, -0.5, 0.3, 1.0, 2.0}) {
    EXPECT_NEAR(lambda_real(-U, U), 1.0, 1e-15);
    EXPECT_NEAR(lambda_real(0.0, U), 1.0 - 2.0 * U * U, 1e-15);
    EXPECT_NEAR(lambda_z(Complex(-U), U).real(), 1.0, 1e-15);
  }
}

TEST(Lambda, MatchesQuadratureOffAxis) {
  for (double U : {-1.3, 0.4, 1.0}) {
    for (Complex z : {Complex(0.3, 0.7), Complex(-2.0, 0.5), Complex(1.5, -0.2), Complex(4.0, 3.0)}) {
      EXPECT_LT(std::abs(lambda_z(z, U) - lambda_by_quadrature(z, U)), 1e-8) << U << " " << z;
    }
  }
}

TEST(Lambda, LaurentTail) {
  // four-term expansion at infinity, any U
  for (double U : {-2.0, -0.5, 0.2, 0.5, 0.9, 1.1, 1.2, 2.0}) {
    const double z = 30.0;
    const double b = U * (U * U - 1.5), c = 1.5 * (U * U - 0.5);
    const double series =
        -b / std::pow(z, 3) - c / std::pow(z, 4) - 3 * b / std::pow(z, 5) - 5 * c / std::pow(z, 6);
    EXPECT_NEAR(lambda_real(z, U) / series, 1.0, 1e-4) << U;
  }
  // leading term alone, for speeds where the z^-4 term is below 2% of it on [20, 40]
  for (double U : {0.64, 0.67, 0.69, 0.74, 0.78}) {
    for (double zz = 20.0; zz <= 40.0; zz += 5.0) {
      EXPECT_NEAR(lambda_real(zz, U) * zz * zz * zz / (-U * (U * U - 1.5)), 1.0, 0.02) << U << " " << zz;
    }
  }
}

TEST(Lambda, BoundaryValues) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> du(-3.0, 3.0), dm(-6.0, 6.0);
  for (int i = 0; i < 100; ++i) {
    const double U = du(gen), mu = dm(gen);
    const auto [lp, lm] = lambda_boundary(mu, U);
    const Complex jump{0.0, 2.0 * sqrt_pi * (mu + U) * std::exp(-mu * mu) * q_minus_u(U, mu)};
    EXPECT_LT(std::abs(lp - lm - jump), 1e-12);
    EXPECT_EQ(lp, std::conj(lm));
    EXPECT_DOUBLE_EQ(0.5 * (lp + lm).real(), lambda_real(mu, U));
    EXPECT_DOUBLE_EQ(std::abs(lp), std::abs(lm));
  }
  const auto [a, b] = lambda_boundary(-0.7, 0.7);
  EXPECT_EQ(a.imag(), 0.0);
  EXPECT_NEAR(a.real(), 1.0, 1e-15);
  const double r = kernel_roots(0.5).values[1];
  const auto [c, d] = lambda_boundary(r, 0.5);
  EXPECT_NEAR(c.imag(), 0.0, 1e-15);
  EXPECT_NEAR(c.real(), d.real(), 0.0);
}

TEST(Lambda, BoundaryValuesAreHalfPlaneLimits) {
  const double U = 0.5;
  for (double mu : {-0.3, 0.2, 0.87, 1.5, 3.0}) {
    const auto [lp, lm] = lambda_boundary(mu, U);
    EXPECT_LT(std::abs(lambda_z(Complex(mu, 1e-9), U) - lp), 1e-7);
    EXPECT_LT(std::abs(lambda_z(Complex(mu, -1e-9), U) - lm), 1e-7);
  }
}

TEST(Theta, AnchorsAndLimits) {
  EXPECT_EQ(theta(-inv_sqrt2, inv_sqrt2), 0.0);
  EXPECT_NEAR(theta(inv_sqrt2 + 8.0, inv_sqrt2), 2 * pi, 1e-10);
  const double U = sonic_speed + 0.1;
  EXPECT_NEAR(theta(U + 8.0, U), 3 * pi, 1e-10);
}

TEST(Theta, MatchesUnwrappedArgument) {
  for (double U : {-2.0, -1.0, -0.5, -inv_sqrt2, 0.01, 0.3, 0.5, inv_sqrt2, 1.0, 1.4, 2.0, 5.0}) {
    const ThetaTable tt = build_theta_table(PhaseFunction(U), default_mu_max(U));
    EXPECT_LT(tt.unwrap_discrepancy, 1e-9) << U;
    EXPECT_LT(tt.max_step, 0.5 * pi) << U;
  }
}

TEST(Theta, IncrementsMatchIndex) {
  for (double U : {-2.0, -1.0, -0.3, 0.3, inv_sqrt2, 1.0, 1.4, 2.0, sonic_speed + 0.1}) {
    const int k = regime_index(classify_regime(U));
    EXPECT_NEAR(theta_increment(U, U + 8.0 > 8.0 ? U + 8.0 : 8.0), k * pi, 0.01) << U;
  }
  EXPECT_NEAR(theta_increment(1.0, 9.0), 2 * pi, 0.01);
  EXPECT_NEAR(theta_increment(-1.0, 8.0), pi, 0.01);
  EXPECT_NEAR(theta_increment(-2.0, 8.0), 0.0, 0.01);
  EXPECT_THROW(theta_increment(1.0, 8.0), std::domain_error);
}

TEST(Theta, ContinuousAtKernelRoots) {
  for (double U : {0.5, 1.0, -0.5, 2.0}) {
    const PhaseFunction ph(U);
    for (double r : ph.cut_roots()) {
      EXPECT_NEAR(ph(r - 1e-9), ph(r + 1e-9), 1e-7) << U;
      EXPECT_NEAR(ph(r), ph(r + 1e-9), 1e-7) << U;
    }
  }
}

TEST(Dispersion, SamplesTable) {
  const auto rows = dispersion_samples(1.0, 9.0, 201);
  ASSERT_EQ(rows.size(), 201u);
  EXPECT_EQ(rows.front().mu, -1.0);
  EXPECT_EQ(rows.front().theta, 0.0);
  EXPECT_EQ(rows.back().mu, 9.0);
  EXPECT_NEAR(rows.back().theta, 2 * pi, 1e-10);
  for (const auto& r : rows) EXPECT_DOUBLE_EQ(r.s, s_func(r.mu, 1.0));
  const auto wide = dispersion_samples(1.0, 3.0, 9, -3.0);
  EXPECT_TRUE(std::isnan(wide.front().theta));
}

TEST(Dispersion, EigenfunctionMoments) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> du(-2.5, 2.5), de(0.0, 6.0);
  for (int i = 0; i < 20; ++i) {
    const double U = du(gen);
    const double eta = -U + 1e-3 + de(gen);
    EXPECT_NEAR(eigen_moment(0, eta, U), 1.0, 1e-8) << U << " " << eta;
    EXPECT_NEAR(eigen_moment(1, eta, U), -U, 1e-8) << U << " " << eta;
    EXPECT_NEAR(eigen_moment(2, eta, U), U * U, 1e-8) << U << " " << eta;
  }
}

TEST(Theta, FarLambdaZero) {
  // lambda ~ -b/mu^3 - c/mu^4 changes sign near mu = -c/b
  EXPECT_FALSE(far_lambda_zero(0.5).has_value());
  EXPECT_FALSE(far_lambda_zero(1.0).has_value());
  const auto z = far_lambda_zero(1.2);
  ASSERT_TRUE(z.has_value());
  EXPECT_NEAR(*z, 19.6856, 1e-3);
  EXPECT_GT(default_mu_max(1.2), *z);
  const PhaseFunction ph(1.2);
  EXPECT_NEAR(ph(12.0), 3 * pi, 1e-12);
  EXPECT_NEAR(ph(25.0), 2 * pi, 1e-12);
  const auto tt = build_theta_table(ph, default_mu_max(1.2));
  EXPECT_NEAR(tt.increment, 2 * pi, 1e-12);
  EXPECT_TRUE(far_lambda_zero(-0.05).has_value());
  for (double U : {-3e-3, -1e-4}) {
    const PhaseFunction small(U);
    ASSERT_TRUE(small.lambda_zero().has_value());
    EXPECT_NEAR(*small.lambda_zero() * 2 * std::abs(U), 1.0, 1e-2);
    EXPECT_NEAR(build_theta_table(small, default_mu_max(U)).increment, pi, 1e-12);
  }
  EXPECT_THROW(far_lambda_zero(-1e-6), NumericalError);
}

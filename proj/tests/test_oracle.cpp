#include <cmath>

#include <gtest/gtest.h>

#include "knudsen/oracle.hpp"

using namespace knudsen;

namespace {

// analytic jumps frozen from the factorization engine
struct Frozen {
  double U, eps_T, eps_rho;
};
constexpr Frozen analytic[] = {
    {0.3, 0.2994937, 0.3657766},
    {0.5, 0.5606739, 0.5558687},
    {0.70710678118654752, 0.8869977, 0.7179527},
};

// the oracle's own fits at default resolution
constexpr Frozen slab[] = {
    {0.3, 0.2995071, 0.3657645},
    {0.5, 0.5606959, 0.5558520},
    {0.70710678118654752, 0.8870364, 0.7179282},
};

const OracleSolution& fit05() {
  static const OracleSolution s = fit_jumps(0.5);
  return s;
}

OracleOptions small() {
  OracleOptions o;
  o.L = 5.0;
  o.cells = 100;
  o.nodes = 32;
  o.double_L = false;
  return o;
}

}  // namespace

TEST(OrdinateGrid, MomentsAndSplit) {
  for (double U : {0.3, -2.0, 0.70710678118654752}) {
    const auto g = make_ordinate_grid(U);
    ASSERT_EQ(g.mu.size(), 128u);
    double m0 = 0, m1 = 0, m2 = 0;
    for (std::size_t i = 0; i < g.mu.size(); ++i) {
      m0 += g.w[i];
      m1 += g.w[i] * g.mu[i];
      m2 += g.w[i] * g.mu[i] * g.mu[i];
      EXPECT_GT(std::abs(g.mu[i] + U), 1e-8);
    }
    EXPECT_NEAR(m0, std::sqrt(M_PI), 1e-12);
    EXPECT_NEAR(m1, 0.0, 1e-12);
    EXPECT_NEAR(m2, std::sqrt(M_PI) / 2, 1e-12);
    EXPECT_DOUBLE_EQ(g.x.front(), 0.0);
    EXPECT_DOUBLE_EQ(g.x.back(), 30.0);
    EXPECT_LT(g.x[1], 1e-3);
  }
  OracleOptions bad;
  bad.nodes = 30;
  EXPECT_THROW(make_ordinate_grid(0.5, bad), std::invalid_argument);
}

TEST(OracleSweep, ExactForLinearSource) {
  for (double tau : {1e-6, 3e-5, 0.2, 5.0}) {
    const auto s = oracle_detail::step(tau);
    // constant source: h_out = E h_in + (1 - E) S
    EXPECT_NEAR(s.A + s.B, -std::expm1(-tau), 1e-15);
    // source S(t) = t/tau from zero inflow: int_0^tau e^{-(tau-t)} t/tau dt
    EXPECT_NEAR(s.B, 1.0 - (-std::expm1(-tau)) / tau, 1e-12);
  }
}

TEST(OracleSolve, SourceIterationMatchesDirect) {
  OracleOptions si = small();
  si.method = OracleMethod::SourceIteration;
  const auto a = fit_jumps(0.5, si);
  const auto b = fit_jumps(0.5, small());
  EXPECT_GT(a.iterations, 3);
  EXPECT_NEAR(a.eps_T_fit, b.eps_T_fit, 1e-8);
  EXPECT_NEAR(a.eps_rho_fit, b.eps_rho_fit, 1e-8);
  EXPECT_EQ(a.method, "source-iteration");
  si.max_iterations = 5;
  EXPECT_THROW(fit_jumps(0.5, si), NonConvergence);
}

TEST(OracleSolve, BasisConservesMassFlux) {
  const auto g = make_ordinate_grid(0.5);
  const auto f = solve_basis(0.5, g, BasisElement::Temperature);
  // Int e^{-mu^2} (mu + U) h is constant across the slab, up to the linear-source error
  const double flux0 = f.m[1][0] + 0.5 * f.m[0][0];
  for (std::size_t k = 0; k < f.nx; k += 37) EXPECT_NEAR(f.m[1][k] + 0.5 * f.m[0][k], flux0, 1e-4 * flux0);
  EXPECT_THROW(solve_basis(0.3, g, BasisElement::Density), std::invalid_argument);
}

TEST(OracleFit, AgreesWithAnalyticJumps) {
  for (std::size_t n = 0; n < std::size(analytic); ++n) {
    const auto s = n == 1 ? fit05() : fit_jumps(analytic[n].U);
    EXPECT_NEAR(s.eps_T_fit, analytic[n].eps_T, 0.01 * analytic[n].eps_T) << s.U;
    EXPECT_NEAR(s.eps_rho_fit, analytic[n].eps_rho, 0.01 * analytic[n].eps_rho) << s.U;
    EXPECT_NEAR(s.eps_T_fit, slab[n].eps_T, 1e-6) << s.U;
    EXPECT_NEAR(s.eps_rho_fit, slab[n].eps_rho, 1e-6) << s.U;
    EXPECT_LT(s.L_sensitivity, 2e-3) << s.U;
    EXPECT_LT(s.farfield_residual, 1e-4) << s.U;
  }
}

TEST(OracleFit, RejectsCondensationAndPoorConditioning) {
  EXPECT_THROW(fit_jumps(-0.3), RegimeError);
  EXPECT_THROW(fit_jumps(0.0), RegimeError);
  OracleOptions o = small();
  o.max_condition = 1.0;
  EXPECT_THROW(fit_jumps(0.5, o), IllConditioned);
}

TEST(OracleFit, CondensationRegimes) {
  // one free parameter: eps_T follows from eps_rho (analytic -0.9801377)
  const auto one = fit_eps_T(-0.5, 0.2);
  EXPECT_NEAR(one.eps_T_fit, -0.9801377, 0.01 * 0.9801377);
  EXPECT_LT(one.farfield_residual, 1e-4);
  // two free parameters: any pair decays
  EXPECT_LT(check_pair(-2.0, 0.1, -0.1).farfield_residual, 1e-6);
  EXPECT_LT(check_pair(-2.0, -0.4, 0.3).farfield_residual, 1e-6);
}

TEST(OracleFit, WrongPairDoesNotDecay) {
  OracleOptions o;
  o.double_L = false;
  const auto good = check_pair(0.5, fit05().eps_T_fit, fit05().eps_rho_fit, o);
  const auto bad = check_pair(0.5, 0.6, 0.5, o);
  EXPECT_LT(good.farfield_residual, 1e-4);
  EXPECT_GT(bad.farfield_residual, 100.0 * good.farfield_residual);
}

TEST(OracleProfiles, IdentitiesAndWallDensity) {
  const auto p = oracle_profiles(fit05());
  ASSERT_EQ(p.x.size(), 401u);
  for (std::size_t k = 0; k < p.x.size(); ++k) {
    EXPECT_LT(std::abs(p.identity1_residual[k]), 1e-4);
    EXPECT_LT(std::abs(p.identity2_residual[k]), 1e-4);
  }
  // analytic 1 + I(0) at U = 0.5
  EXPECT_NEAR(p.rho_ratio.front(), 1.18679013, 0.01);
  EXPECT_NEAR(p.rho_ratio.back(), 1.0, 1e-4);
  EXPECT_NEAR(p.u.back(), 0.5, 1e-4);
  EXPECT_NEAR(p.t_ratio.back(), 1.0, 1e-4);
  EXPECT_NEAR(interpolate(p.x, p.rho_ratio, 0.0), p.rho_ratio.front(), 1e-15);
  EXPECT_NEAR(interpolate(p.x, p.rho_ratio, 100.0), p.rho_ratio.back(), 1e-15);
}

TEST(OracleSolve, ZeroInflowAndSuperposition) {
  const OracleOptions o = small();
  const auto g = make_ordinate_grid(0.5, o);
  const SlabSolver s(g, o);
  const auto z = s.solve(std::vector<double>(g.mu.size(), 0.0));
  for (double v : z.h) EXPECT_EQ(v, 0.0);
  const auto b1 = basis_inflow(BasisElement::Density, g);
  const auto b2 = basis_inflow(BasisElement::Drift, g);
  std::vector<double> mix(b1.size());
  for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = 0.7 * b1[i] - 1.3 * b2[i];
  const auto f1 = s.solve(b1), f2 = s.solve(b2), fm = s.solve(mix);
  for (std::size_t n = 0; n < fm.h.size(); ++n) EXPECT_NEAR(fm.h[n], 0.7 * f1.h[n] - 1.3 * f2.h[n], 1e-9);
}

TEST(OracleSolve, MaximumPrincipleAtRest) {
  // U = 0, unit inflow at the wall and vacuum at L. The kernel changes sign so h
  // itself is not bounded, but the density moment decays monotonically inside [0, 1].
  const OracleOptions o = small();
  const auto g = make_ordinate_grid(0.0, o);
  const auto f = solve_basis(0.0, g, BasisElement::Density, o);
  for (std::size_t k = 0; k < f.nx; ++k) {
    EXPECT_GT(f.m[0][k], 0.0);
    EXPECT_LT(f.m[0][k], 1.0);
    if (k > 0) EXPECT_LE(f.m[0][k], f.m[0][k - 1]);
  }
}

TEST(OracleFit, GridRefinement) {
  OracleOptions fine;
  fine.nodes = 256;
  fine.cells = 800;
  fine.double_L = false;
  const auto s = fit_jumps(0.5, fine);
  EXPECT_LT(std::abs(s.eps_T_fit / fit05().eps_T_fit - 1.0), 5e-3);
  EXPECT_LT(std::abs(s.eps_rho_fit / fit05().eps_rho_fit - 1.0), 5e-3);
}

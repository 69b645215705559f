#pragma once

// Canonical solution of the homogeneous Riemann problem X^+/X^- = lambda^+/lambda^-
// on the cut [-U, inf):
//
//   V(z) = (1/pi) Int_{-U}^{inf} (theta(t) - k pi) / (t - z) dt,
//   X(z) = (z + U)^{-k} exp(V(z)),
//
// k being the index of the regime. The cut is truncated at mu_max where
// theta has settled to k pi.

#include <cmath>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "knudsen/constants.hpp"
#include "knudsen/dispersion.hpp"
#include "knudsen/errors.hpp"
#include "knudsen/kernel.hpp"
#include "knudsen/quadrature.hpp"
#include "knudsen/specfun.hpp"

namespace knudsen {

struct FactorOptions {
  double mu_max = 0.0;  ///< 0 selects default_mu_max(U)
  QuadOptions quad{1e-12, 1e-12, 4000, 1e-9};
};

struct FactorData {
  double U = 0.0;
  int k = 0;
  double mu_max = 0.0;
  PhaseFunction phase;
  ThetaTable theta_table;
  double v1 = 0.0;  ///< V(z) = v1/z + O(z^-2)
  QuadOptions quad;

  FactorData(double u, int index, double mm, QuadOptions q)
      : U(u), k(index), mu_max(mm), phase(u), quad(q) {}

  /// theta(t) - k pi
  double reduced_phase(double t) const { return phase(t) - k * pi; }
  std::span<const double> breaks() const { return phase.breaks(); }
};

using FactorPtr = std::shared_ptr<const FactorData>;

/// Builds the factor context for U with an explicit index k.
inline FactorPtr make_factor_data(double U, int k, const FactorOptions& opt = {}) {
  if (k < 0 || k > 3) throw RegimeError("factorization: index must be 0..3");
  double mm = opt.mu_max > 0.0 ? opt.mu_max : default_mu_max(U);
  auto fd = std::make_shared<FactorData>(U, k, mm, opt.quad);
  for (int i = 0; i < 8 && std::abs(fd->reduced_phase(mm)) >= 1e-12; ++i) mm += 2.0;
  fd->mu_max = mm;
  fd->theta_table = build_theta_table(fd->phase, mm);
  if (std::abs(fd->theta_table.increment - k * pi) > 0.05) {
    throw NumericalError("factorization: theta increment " +
                             std::to_string(fd->theta_table.increment / pi) +
                             " pi does not match index " + std::to_string(k),
                         std::abs(fd->theta_table.increment - k * pi));
  }
  const FactorData& f = *fd;
  std::vector<double> breaks{-U};
  for (double r : f.breaks()) breaks.push_back(r);
  breaks.push_back(mm);
  auto g = [&f](double t) { return f.reduced_phase(t); };
  fd->v1 = -require_converged(integrate(g, std::span<const double>(breaks), f.quad), "v1_moment") / pi;
  return fd;
}

/// Builds the factor context with the index of classify_regime(U).
inline FactorPtr make_factor_data(double U, const FactorOptions& opt = {}) {
  const Regime r = classify_regime(U);
  if (r == Regime::DiscreteBoundary)
    throw RegimeError("factorization: U = " + std::to_string(U) + " lies on a regime boundary");
  return make_factor_data(U, regime_index(r), opt);
}

/// V(z). Real z inside the cut gives the principal value.
inline Complex v_func(Complex z, const FactorData& fd, const QuadOptions& opt) {
  if (z.imag() == 0.0 && z.real() == -fd.U) throw std::domain_error("v_func: z = -U is a branch point");
  auto g = [&fd](double t) { return fd.reduced_phase(t); };
  return cauchy_integral(g, -fd.U, fd.mu_max, z, fd.breaks(), opt, "v_func") / pi;
}

inline Complex v_func(Complex z, const FactorData& fd) { return v_func(z, fd, fd.quad); }

inline double v_func(double mu, const FactorData& fd) { return v_func(Complex(mu), fd).real(); }

inline double v1_moment(const FactorData& fd) { return fd.v1; }

/// |X^{+/-}(mu)| = (mu + U)^{-k} exp(V(mu)) for mu > -U.
inline double x_modulus(double mu, const FactorData& fd, const QuadOptions& opt) {
  return std::exp(v_func(Complex(mu), fd, opt).real() - fd.k * std::log(mu + fd.U));
}

inline double x_modulus(double mu, const FactorData& fd) { return x_modulus(mu, fd, fd.quad); }

/// (X^+(mu), X^-(mu)) = |X| exp(+/- i (theta - k pi)).
inline std::pair<Complex, Complex> x_boundary(double mu, const FactorData& fd) {
  const double m = x_modulus(mu, fd);
  const double f = fd.reduced_phase(mu);
  return {std::polar(m, f), std::polar(m, -f)};
}

/// X(z). On the cut the Cauchy principal value (X^+ + X^-)/2 = |X| cos(theta - k pi)
/// is returned; at kernel roots this is the common boundary value.
inline Complex x_func(Complex z, const FactorData& fd, const QuadOptions& opt) {
  if (z.imag() == 0.0 && z.real() > -fd.U) {
    const double mu = z.real();
    return {x_modulus(mu, fd, opt) * std::cos(fd.reduced_phase(mu)), 0.0};
  }
  return std::pow(z + fd.U, -fd.k) * std::exp(v_func(z, fd, opt));
}

inline Complex x_func(Complex z, const FactorData& fd) { return x_func(z, fd, fd.quad); }

inline double x_func(double mu, const FactorData& fd) { return x_func(Complex(mu), fd).real(); }

/// Sokhotsky density of X: (X^+ - X^-)/(2 pi i) = (-1)^k s |X| / (pi |lambda^+|).
inline double x_jump_density(double mu, const FactorData& fd) {
  if (mu <= -fd.U) return 0.0;
  const double s = s_func(mu, fd.U);
  if (s == 0.0) return 0.0;
  const double lam = std::hypot(lambda_real(mu, fd.U), s);
  const double sign = fd.k % 2 == 0 ? 1.0 : -1.0;
  return sign * s * x_modulus(mu, fd) / (pi * lam);
}

/// X(z) rebuilt from its jump across the cut (plus the constant limit 1 when k = 0).
inline Complex x_integral_representation(Complex z, const FactorData& fd,
                                         const QuadOptions& opt = {1e-11, 1e-10, 2000}) {
  auto g = [&fd](double t) { return x_jump_density(t, fd); };
  const Complex c =
      cauchy_integral(g, -fd.U, fd.mu_max, z, fd.breaks(), opt, "x_integral_representation");
  return c + (fd.k == 0 ? 1.0 : 0.0);
}

}  // namespace knudsen

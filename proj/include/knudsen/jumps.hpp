#pragma once

// Temperature and density jumps from the analytic solution.
//
// The auxiliary function N(z) = (h(0,z) + P(z)/X(z)) / q(-U,z), with
// h(0,mu) = eps_rho - 2 U mu + eps_T (mu^2 - 1/2) the wall data and
// P(z) = c0 + c1 z + c2 z^2, must be analytic at the zeros of q (pole
// destruction) and vanish at infinity. Both requirements fix the jumps in
// the evaporation regime; in condensation they leave one or two of them free.

#include <array>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "knudsen/constants.hpp"
#include "knudsen/errors.hpp"
#include "knudsen/factorization.hpp"
#include "knudsen/kernel.hpp"

namespace knudsen {

/// h(0, mu) = eps_rho - 2 U mu + eps_T (mu^2 - 1/2)
struct BoundaryPolynomial {
  double U = 0.0;
  double eps_T = 0.0;
  double eps_rho = 0.0;

  template <class T>
  T operator()(T mu) const {
    return eps_rho - 2.0 * U * mu + eps_T * (mu * mu - 0.5);
  }
};

struct PoleResidual {
  double root;
  double x_value;   ///< X at the root (real)
  double residual;  ///< h(0, r) X(r) + P(r), scaled by max(1, |X(r)|)
};

struct JumpResult {
  double U = 0.0;
  Regime regime = Regime::DiscreteBoundary;
  bool solvable = false;
  std::string message;

  std::optional<double> eps_T, eps_rho, K, R;
  std::optional<double> c0, c1, c2;
  std::vector<PoleResidual> residuals;
  std::optional<double> v1, v_at_u;

  struct FreeParams {
    std::optional<double> eps_rho, eps_T;
  } free_params;

  /// Named secondary values (alternative formulas, published values, checks).
  std::map<std::string, double> diagnostics;

  FactorPtr factor;

  BoundaryPolynomial boundary() const { return {U, eps_T.value_or(0.0), eps_rho.value_or(0.0)}; }

  template <class T>
  T polynomial(T z) const {
    return c0.value_or(0.0) + z * (c1.value_or(0.0) + z * c2.value_or(0.0));
  }

  double max_residual() const {
    double m = 0.0;
    for (const auto& r : residuals) m = std::max(m, std::abs(r.residual));
    return m;
  }
};

/// Removable-singularity tolerance for pole conditions.
inline constexpr double pole_residual_tolerance = 1e-8;

namespace detail {

inline double real_x_at(double r, const FactorData& fd) { return x_func(Complex(r), fd).real(); }

inline JumpResult start_result(double U, Regime reg, const FactorPtr& fd) {
  JumpResult jr;
  jr.U = U;
  jr.regime = reg;
  jr.solvable = true;
  jr.factor = fd;
  jr.v1 = fd->v1;
  jr.v_at_u = v_func(Complex(U), *fd).real();
  return jr;
}

inline void finish(JumpResult& jr) {
  const auto& fd = *jr.factor;
  const BoundaryPolynomial h = jr.boundary();
  const KernelRoots kr = kernel_roots(jr.U);
  for (double r : kr.roots()) {
    const double x = real_x_at(r, fd);
    const double res = (h(r) * x + jr.polynomial(r)) / std::max(1.0, std::abs(x));
    jr.residuals.push_back({r, x, res});
  }
  jr.K = *jr.eps_T / (2.0 * jr.U);
  jr.R = *jr.eps_rho / (2.0 * jr.U);
  if (jr.max_residual() > 1e-6) {
    throw NumericalError("pole destruction residual " + std::to_string(jr.max_residual()) +
                             " at U = " + std::to_string(jr.U),
                         jr.max_residual());
  }
}

inline void require_regime(double U, bool ok, const char* what) {
  if (!ok) throw RegimeError(std::string(what) + ": U = " + std::to_string(U) + " outside its interval");
}

}  // namespace detail

/// Unique evaporation solution, 0 < U < sqrt(3/2), U != 1/sqrt(2).
inline JumpResult jump_evaporation(double U, const FactorOptions& opt = {}) {
  detail::require_regime(U,
                         classify_regime(U) == Regime::UniqueEvaporation && std::abs(U - inv_sqrt2) > 1e-10,
                         "jump_evaporation");
  const auto fd = make_factor_data(U, 2, opt);
  JumpResult jr = detail::start_result(U, Regime::UniqueEvaporation, fd);
  const KernelRoots kr = kernel_roots(U);
  const double m1 = kr.values[0], m2 = kr.values[1];
  const double x1 = detail::real_x_at(m1, *fd), x2 = detail::real_x_at(m2, *fd);
  const double eps_T = 2.0 * U * (m1 - m2) * x1 * x2 / ((m1 * m1 - m2 * m2) * x1 * x2 + x1 - x2);
  jr.eps_T = eps_T;
  jr.eps_rho = 2.0 * U * m1 - (m1 * m1 - 0.5 - 1.0 / x1) * eps_T;
  jr.diagnostics["eps_rho_second_root"] = 2.0 * U * m2 - (m2 * m2 - 0.5 - 1.0 / x2) * eps_T;
  jr.c0 = -eps_T;
  detail::finish(jr);
  return jr;
}

/// Value printed in the literature for eps_rho at U = 1/sqrt(2).
inline constexpr double published_degenerate_eps_rho = -2.4907;

/// U = 1/sqrt(2): q(-U, .) is linear with its zero at mu = U on the cut.
inline JumpResult jump_degenerate(const FactorOptions& opt = {}) {
  const double U = inv_sqrt2;
  const auto fd = make_factor_data(U, 2, opt);
  JumpResult jr = detail::start_result(U, Regime::DegenerateHalfSqrt2, fd);
  const double v1 = fd->v1;
  const double vu = *jr.v_at_u;

  // decay of N at infinity: c0 = -eps_T and c0 (2U - V1) = 2U
  const double eps_T = sqrt2 / (v1 - sqrt2);
  const double c0 = -eps_T;

  // V1 again, from the Laurent coefficient of V (Richardson on z V(z))
  const double za = 1e4, zb = 2e4;
  const double v1_laurent = 2.0 * zb * v_func(zb, *fd) - za * v_func(za, *fd);
  const double eps_T_laurent = sqrt2 / (v1_laurent - sqrt2);
  if (std::abs(eps_T_laurent - eps_T) > 1e-6) {
    throw NumericalError("jump_degenerate: eps_T from moment and Laurent coefficient disagree",
                         std::abs(eps_T_laurent - eps_T));
  }

  // pole at mu = U: eps_rho - 1 + c0 / X(U) = 0 with X(U) = |X(U)| cos(theta(U) - 2 pi)
  const double xu = detail::real_x_at(U, *fd);
  jr.eps_T = eps_T;
  jr.c0 = c0;
  jr.eps_rho = 1.0 - c0 / xu;

  jr.diagnostics["v1_laurent"] = v1_laurent;
  jr.diagnostics["eps_T_laurent"] = eps_T_laurent;
  jr.diagnostics["decay_condition_residual"] = c0 * (sqrt2 - v1) - 2.0 * U;
  jr.diagnostics["x_at_u"] = xu;
  // the same pole condition with the modulus exp(V(U))/2 in place of X(U)
  jr.diagnostics["eps_rho_modulus_formula"] = 1.0 - 2.0 * sqrt2 * std::exp(-vu) / (sqrt2 - v1);
  jr.diagnostics["eps_rho_published"] = published_degenerate_eps_rho;
  detail::finish(jr);
  if (std::abs(jr.diagnostics["decay_condition_residual"]) > 1e-8)
    throw NumericalError("jump_degenerate: decay condition not satisfied",
                         jr.diagnostics["decay_condition_residual"]);
  return jr;
}

/// -sqrt(3/2) < U < 0: one-parameter family, eps_rho prescribed.
inline JumpResult jump_condensation_one_param(double U, double eps_rho, const FactorOptions& opt = {}) {
  detail::require_regime(U, classify_regime(U) == Regime::OneParameterCondensation,
                         "jump_condensation_one_param");
  if (!std::isfinite(eps_rho)) throw std::invalid_argument("eps_rho must be finite");
  const auto fd = make_factor_data(U, 1, opt);
  JumpResult jr = detail::start_result(U, Regime::OneParameterCondensation, fd);
  jr.free_params.eps_rho = eps_rho;
  jr.eps_rho = eps_rho;
  const KernelRoots kr = kernel_roots(U);
  if (kr.degenerate) {
    // q linear; decay needs c0 = 2U + eps_T (U - V1), the single pole fixes eps_T
    const double r = kr.values[0];
    const double xr = detail::real_x_at(r, *fd);
    const double eps_T = (xr * (eps_rho - 1.0) + 2.0 * U) / fd->v1;
    jr.eps_T = eps_T;
    jr.c1 = -eps_T;
    jr.c0 = 2.0 * U + eps_T * (U - fd->v1);
  } else {
    const double m1 = kr.values[0], m2 = kr.values[1];
    const double x1 = detail::real_x_at(m1, *fd), x2 = detail::real_x_at(m2, *fd);
    const double eps_T = (2.0 * U * (m1 * x1 - m2 * x2) - eps_rho * (x1 - x2)) /
                         (m2 - m1 + x1 * (m1 * m1 - 0.5) - x2 * (m2 * m2 - 0.5));
    jr.eps_T = eps_T;
    jr.c1 = -eps_T;
    const BoundaryPolynomial h{U, eps_T, eps_rho};
    jr.c0 = 0.5 * (-x1 * h(m1) + eps_T * m1 - x2 * h(m2) + eps_T * m2);
  }
  detail::finish(jr);
  return jr;
}

/// U < -sqrt(3/2): two-parameter family, eps_T and eps_rho prescribed.
inline JumpResult jump_condensation_two_param(double U, double eps_T, double eps_rho,
                                              const FactorOptions& opt = {}) {
  detail::require_regime(U, classify_regime(U) == Regime::TwoParameterCondensation,
                         "jump_condensation_two_param");
  if (!std::isfinite(eps_rho) || !std::isfinite(eps_T))
    throw std::invalid_argument("eps_T and eps_rho must be finite");
  const auto fd = make_factor_data(U, 0, opt);
  JumpResult jr = detail::start_result(U, Regime::TwoParameterCondensation, fd);
  jr.free_params.eps_rho = eps_rho;
  jr.free_params.eps_T = eps_T;
  jr.eps_rho = eps_rho;
  jr.eps_T = eps_T;
  const double c2 = -eps_T;
  jr.c2 = c2;
  const KernelRoots kr = kernel_roots(U);
  const BoundaryPolynomial h{U, eps_T, eps_rho};
  Eigen::Matrix2d A;
  Eigen::Vector2d b;
  for (int i = 0; i < 2; ++i) {
    const double m = kr.values[i];
    A(i, 0) = 1.0;
    A(i, 1) = m;
    b(i) = -c2 * m * m - h(m) * detail::real_x_at(m, *fd);
  }
  const Eigen::JacobiSVD<Eigen::Matrix2d> svd(A);
  const double cond = svd.singularValues()(0) / svd.singularValues()(1);
  if (!(cond < 1e12)) throw SingularSystemError("two-parameter condensation: singular pole system", cond);
  const Eigen::Vector2d c = A.partialPivLu().solve(b);
  jr.c0 = c(0);
  jr.c1 = c(1);
  jr.diagnostics["condition_number"] = cond;
  detail::finish(jr);
  return jr;
}

/// Degenerate-speed snapping used by the dispatcher (the 1e-10 gate of
/// jump_evaporation is tighter than typical user input precision).
inline constexpr double degenerate_snap = 1e-8;

struct JumpRequest {
  double U = 0.0;
  std::optional<double> eps_rho;
  std::optional<double> eps_T;
};

/// Selects the solver for U. NoSolution and missing free parameters come back
/// as unsolvable results with a message; regime boundaries raise RegimeError.
inline JumpResult solve_jumps(const JumpRequest& req, const FactorOptions& opt = {}) {
  const double U = req.U;
  if (!std::isfinite(U)) throw std::invalid_argument("U must be finite");
  if (std::abs(U - inv_sqrt2) < degenerate_snap) return jump_degenerate(opt);
  const Regime reg = classify_regime(U);
  JumpResult jr;
  jr.U = U;
  jr.regime = reg;
  switch (reg) {
    case Regime::DiscreteBoundary:
      throw RegimeError("U = " + std::to_string(U) +
                        " is a regime boundary (U = 0 or |U| = sqrt(3/2)); no analytic solution");
    case Regime::NoSolution:
      jr.message = "no solution for U > sqrt(3/2): the index is 3 and N(z) cannot vanish at infinity";
      return jr;
    case Regime::UniqueEvaporation:
    case Regime::DegenerateHalfSqrt2:
      return jump_evaporation(U, opt);
    case Regime::OneParameterCondensation:
      if (!req.eps_rho) {
        jr.message = "one-parameter condensation family: eps_rho must be supplied";
        return jr;
      }
      return jump_condensation_one_param(U, *req.eps_rho, opt);
    case Regime::TwoParameterCondensation:
      if (!req.eps_rho || !req.eps_T) {
        jr.message = "two-parameter condensation family: eps_T and eps_rho must be supplied";
        return jr;
      }
      return jump_condensation_two_param(U, *req.eps_T, *req.eps_rho, opt);
  }
  return jr;
}

// ---------------------------------------------------------------------------
// Auxiliary function N(z)

namespace detail {

inline const FactorData& solvable_factor(const JumpResult& jr) {
  if (!jr.solvable || !jr.factor) {
    throw RegimeError("auxiliary function: no admissible N(z) for U = " + std::to_string(jr.U) +
                      " (" + std::string(to_string(jr.regime)) + ")");
  }
  return *jr.factor;
}

// 1/X grows like z^k, so V needs a tighter absolute tolerance far from the cut start
inline QuadOptions n_quad(Complex z, const FactorData& fd) {
  return std::abs(z) > 5.0 ? QuadOptions{1e-15, 1e-13, 4000, 1e-11} : fd.quad;
}

// h(0,mu) + P(mu) Re(1/X^+(mu)) over q, the principal value of N on the cut
inline double n_cut_average(double mu, const JumpResult& jr, const FactorData& fd) {
  const BoundaryPolynomial h = jr.boundary();
  const double inv_x = std::cos(fd.reduced_phase(mu)) / x_modulus(mu, fd, n_quad(mu, fd));
  return (h(mu) + jr.polynomial(mu) * inv_x) / q_minus_u(jr.U, mu);
}

inline Complex n_raw(Complex z, const JumpResult& jr, const FactorData& fd) {
  if (z.imag() == 0.0 && z.real() > -jr.U) return n_cut_average(z.real(), jr, fd);
  const BoundaryPolynomial h = jr.boundary();
  const Complex x = x_func(z, fd, n_quad(z, fd));
  return (h(z) + jr.polynomial(z) / x) / q_minus_u(jr.U, z);
}

}  // namespace detail

/// N(z); on the cut the principal value (N^+ + N^-)/2. Near a zero of q the removable singularity is evaluated
/// from symmetric offsets in Re z with Richardson extrapolation.
inline Complex auxiliary_n(Complex z, const JumpResult& jr) {
  const FactorData& fd = detail::solvable_factor(jr);
  const KernelRoots kr = kernel_roots(jr.U);
  for (double r : kr.roots()) {
    if (std::abs(z - r) < 1e-5) {
      auto sym = [&](double d) {
        return 0.5 * (detail::n_raw(z + d, jr, fd) + detail::n_raw(z - d, jr, fd));
      };
      const double d = 1e-3;
      return (4.0 * sym(0.5 * d) - sym(d)) / 3.0;
    }
  }
  return detail::n_raw(z, jr, fd);
}

/// (N^+(mu), N^-(mu)) on the cut.
inline std::pair<Complex, Complex> n_boundary(double mu, const JumpResult& jr) {
  const FactorData& fd = detail::solvable_factor(jr);
  const auto [xp, xm] = x_boundary(mu, fd);
  const BoundaryPolynomial h = jr.boundary();
  const double q = q_minus_u(jr.U, mu);
  const double p = jr.polynomial(mu);
  return {(h(mu) + p / xp) / q, (h(mu) + p / xm) / q};
}

/// |N(10^3)| / |N(10)| along the positive real axis (or beyond the cut end).
inline double decay_ratio(const JumpResult& jr) {
  const double far = std::abs(auxiliary_n(Complex(1e3), jr));
  const double near = std::abs(auxiliary_n(Complex(10.0), jr));
  return far / near;
}

}  // namespace knudsen

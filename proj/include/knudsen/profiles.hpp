#pragma once

// Continuous-spectrum coefficient a(eta), distribution h(x, mu) and the
// macroscopic fields of the Knudsen layer.
//
// From the jump of N across the cut,
//
//   2 sqrt(pi) i (eta + U) a(eta) = N^+ - N^- = P(eta) (1/X^+ - 1/X^-) / q
//                                = -2i P(eta) sin(theta - k pi) / (q |X|),
//
// and sin(theta) = s / |lambda^+| with s = sqrt(pi) e^{-eta^2} (eta + U) q, so
//
//   a(eta) = -(-1)^k P(eta) e^{-eta^2} / (|lambda^+(eta)| |X(eta)|)
//
// with no removable singularity left at the kernel roots.

#include <algorithm>
#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "knudsen/constants.hpp"
#include "knudsen/dispersion.hpp"
#include "knudsen/factorization.hpp"
#include "knudsen/jumps.hpp"
#include "knudsen/kernel.hpp"

namespace knudsen {

namespace detail {

inline double parity(int k) { return k % 2 == 0 ? 1.0 : -1.0; }

}  // namespace detail

/// a(eta) for eta > -U.
inline double continuum_a(double eta, const JumpResult& jr) {
  const FactorData& fd = detail::solvable_factor(jr);
  if (!(eta > -jr.U)) throw std::domain_error("continuum coefficient: eta must exceed -U");
  const double lam = std::hypot(fd.phase.lambda_at(eta), s_func(eta, jr.U));
  return -detail::parity(fd.k) * jr.polynomial(eta) * std::exp(-eta * eta) / (lam * x_modulus(eta, fd));
}

/// (eta + U) a(eta).
inline double continuum_coefficient(double eta, const JumpResult& jr) {
  return (eta + jr.U) * continuum_a(eta, jr);
}

/// (eta + U) a(eta) = -P sin(theta - k pi) / (sqrt(pi) q |X|) evaluated as
/// written; NaN at a kernel root. In the evaporation regime P = -eps_T and this
/// is eps_T sin(theta) / (sqrt(pi) q X).
inline double continuum_coefficient_direct(double eta, const JumpResult& jr) {
  const FactorData& fd = detail::solvable_factor(jr);
  const double q = q_minus_u(jr.U, eta);
  if (q == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return -jr.polynomial(eta) * std::sin(fd.reduced_phase(eta)) / (sqrt_pi * q * x_modulus(eta, fd));
}

struct ContinuumOptions {
  double t_min = -32.0;     ///< eta + U starts at e^{t_min}
  double panel_width = 0.5;  ///< in t = log(eta + U)
  double eta_max = 9.0;      ///< a(eta) ~ e^{-eta^2} is negligible beyond this
};

/// a(eta) tabulated on a composite 20-point Gauss-Legendre rule in
/// t = log(eta + U), which resolves the wall end eta -> -U.
///
/// At a far zero eta0 of lambda, |lambda^+| ~ |X| and a(eta) carries a
/// Lorentzian of width w = |s/lambda'| whose integral stays finite as w -> 0.
/// A resolvable one is graded into the panels; below that it is kept as a
/// point mass, i.e. a discrete mode e^{-x/(eta0+U)}.
struct ContinuumTable {
  double U = 0.0;
  double eta_top = 0.0;
  std::vector<double> eta;     ///< nodes
  std::vector<double> offset;  ///< eta + U, exact
  std::vector<double> weight;  ///< d eta weights
  std::vector<double> a;
  std::optional<double> mode_eta;
  double mode_weight = 0.0;  ///< Int a(eta) d eta across the spike
  const JumpResult* jr = nullptr;
};

namespace detail {

// e^{V} / |eta - eta0| at the far lambda zero, symmetric and Richardson-extrapolated
inline double far_zero_modulus_ratio(double eta0, const FactorData& fd) {
  auto avg = [&](double d) {
    return 0.5 * (std::exp(v_func(eta0 + d, fd)) + std::exp(v_func(eta0 - d, fd))) / d;
  };
  const double d = 1e-3;
  return (4.0 * avg(0.5 * d) - avg(d)) / 3.0;
}

}  // namespace detail

inline ContinuumTable build_continuum_table(const JumpResult& jr, const ContinuumOptions& opt = {}) {
  const FactorData& fd = detail::solvable_factor(jr);
  ContinuumTable tab;
  tab.U = jr.U;
  tab.jr = &jr;
  tab.eta_top = std::min(fd.mu_max, std::max(opt.eta_max, -jr.U + 6.0));

  std::vector<double> cuts{opt.t_min, std::log(tab.eta_top + jr.U)};
  for (double b : fd.breaks())
    if (b > -jr.U && b < tab.eta_top) cuts.push_back(std::log(b + jr.U));

  if (const auto z = fd.phase.lambda_zero()) {
    const double eta0 = *z, h = 1e-4 * eta0;
    const double slope = (lambda_real(eta0 + h, jr.U) - lambda_real(eta0 - h, jr.U)) / (2.0 * h);
    const double s0 = s_func(eta0, jr.U);
    const double w = std::abs(s0 / slope);
    // theta falling by pi makes |X| vanish with lambda; rising, there is no spike
    const double step = fd.phase(eta0 + 1e-3) - fd.phase(eta0 - 1e-3);
    if (step < 0.0) {
      if (w > 1e-9 * (eta0 + jr.U) && eta0 < tab.eta_top) {
        for (int j = 0; j < 60 && w * std::ldexp(1.0, j) < 1.0; ++j) {
          for (double sg : {-1.0, 1.0}) {
            const double pt = eta0 + sg * w * std::ldexp(1.0, j);
            if (pt > -jr.U && pt < tab.eta_top) cuts.push_back(std::log(pt + jr.U));
          }
        }
      } else {
        const double E = detail::far_zero_modulus_ratio(eta0, fd);
        const double sgn = std::signbit(s0) || (s0 == 0.0 && std::signbit(slope)) ? -1.0 : 1.0;
        tab.mode_eta = eta0;
        tab.mode_weight = -detail::parity(fd.k) * sqrt_pi * sgn * jr.polynomial(eta0) *
                          std::pow(eta0 + jr.U, fd.k - 1) / (q_minus_u(jr.U, eta0) * E);
      }
    }
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  using GL = boost::math::quadrature::gauss<double, 20>;
  const auto& xs = GL::abscissa();
  const auto& ws = GL::weights();
  auto node = [&](double t, double w) {
    const double e = std::exp(t);
    tab.offset.push_back(e);
    tab.eta.push_back(-jr.U + e);
    tab.weight.push_back(w * e);
  };
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const int n = std::max(1, static_cast<int>(std::ceil((cuts[i + 1] - cuts[i]) / opt.panel_width)));
    const double h = (cuts[i + 1] - cuts[i]) / n;
    for (int p = 0; p < n; ++p) {
      const double mid = cuts[i] + (p + 0.5) * h, half = 0.5 * h;
      for (std::size_t j = 0; j < xs.size(); ++j) {
        node(mid - half * xs[j], half * ws[j]);
        if (xs[j] != 0.0) node(mid + half * xs[j], half * ws[j]);
      }
    }
  }
  tab.a.resize(tab.eta.size());
  for (std::size_t i = 0; i < tab.eta.size(); ++i) tab.a[i] = continuum_a(tab.eta[i], jr);
  return tab;
}

/// I(x) = (1/sqrt(pi)) Int e^{-x/(eta+U)} a(eta) d eta, shared by all three fields.
inline double shared_integral(double x, const ContinuumTable& tab) {
  if (x < 0.0) throw std::domain_error("shared integral: x must be >= 0");
  double sum = 0.0;
  for (std::size_t i = 0; i < tab.eta.size(); ++i) {
    const double r = x / tab.offset[i];
    if (r < 690.0) sum += tab.weight[i] * std::exp(-r) * tab.a[i];
  }
  if (tab.mode_eta) {
    const double r = x / (*tab.mode_eta + tab.U);
    if (r < 690.0) sum += tab.mode_weight * std::exp(-r);
  }
  return sum / sqrt_pi;
}

/// h(x, mu) = q(mu)/sqrt(pi) PV Int e^{-x/(eta+U)} (eta+U) a(eta) / (eta - mu) d eta
///          + e^{mu^2} lambda(mu) a(mu) e^{-x/(mu+U)} for mu > -U.
/// The PV uses subtraction of the integrand at mu plus the exact log term.
inline double distribution_h(double x, double mu, const ContinuumTable& tab) {
  if (x < 0.0) throw std::domain_error("distribution: x must be >= 0");
  const JumpResult& jr = *tab.jr;
  const FactorData& fd = detail::solvable_factor(jr);
  const double U = tab.U;
  auto G = [x](double off, double a) {
    const double r = x / off;
    return r < 690.0 ? std::exp(-r) * off * a : 0.0;
  };
  const bool on_cut = mu > -U;
  double a_mu = 0.0, g_mu = 0.0;
  if (on_cut) {
    a_mu = continuum_a(mu, jr);
    g_mu = G(mu + U, a_mu);
  }
  const bool pv = on_cut && mu < tab.eta_top;
  double sum = 0.0;
  for (std::size_t i = 0; i < tab.eta.size(); ++i) {
    const double g = G(tab.offset[i], tab.a[i]);
    sum += tab.weight[i] * (pv ? g - g_mu : g) / (tab.eta[i] - mu);
  }
  if (pv) sum += g_mu * std::log((tab.eta_top - mu) / (mu + U));
  if (tab.mode_eta && *tab.mode_eta != mu) {
    const double off = *tab.mode_eta + U;
    sum += G(off, tab.mode_weight) / (*tab.mode_eta - mu);
  }
  double h = q_minus_u(U, mu) * sum / sqrt_pi;
  if (on_cut && x / (mu + U) < 690.0) {
    // e^{mu^2} a(mu) without overflow
    const double lam = fd.phase.lambda_at(mu);
    const double mod = std::hypot(lam, s_func(mu, U));
    const double ea = -detail::parity(fd.k) * jr.polynomial(mu) / (mod * x_modulus(mu, fd));
    h += lam * ea * std::exp(-x / (mu + U));
  }
  return h;
}

struct ProfileGrid {
  std::vector<double> x;
  std::vector<double> rho_ratio;
  std::vector<double> u;
  std::vector<double> t_ratio;
  std::vector<double> identity1_residual;  ///< rho/rho_inf + U(x)/U - 2
  std::vector<double> identity2_residual;  ///< T/T_inf - 1 - 2(U^2 - 1/2)(rho/rho_inf - 1)
};

/// Log-spaced points over [1e-3, xmax].
inline std::vector<double> default_profile_x(double xmax = 20.0, int points = 64) {
  if (!(xmax > 1e-3) || points < 2) throw std::invalid_argument("profile grid: need xmax > 1e-3 and points >= 2");
  std::vector<double> xs(points);
  const double l0 = std::log(1e-3), l1 = std::log(xmax);
  for (int i = 0; i < points; ++i) xs[i] = std::exp(l0 + (l1 - l0) * i / (points - 1));
  xs.back() = xmax;
  return xs;
}

inline double density_ratio(double I) { return 1.0 + I; }
inline double velocity(double I, double U) { return U * (1.0 - I); }
inline double temperature_ratio(double I, double U) { return 1.0 + 2.0 * (U * U - 0.5) * I; }

inline ProfileGrid compute_profiles(const std::vector<double>& xs, const ContinuumTable& tab) {
  ProfileGrid g;
  const double U = tab.U;
  for (double x : xs) {
    const double I = shared_integral(x, tab);
    const double rho = density_ratio(I), u = velocity(I, U), t = temperature_ratio(I, U);
    g.x.push_back(x);
    g.rho_ratio.push_back(rho);
    g.u.push_back(u);
    g.t_ratio.push_back(t);
    g.identity1_residual.push_back(rho + u / U - 2.0);
    g.identity2_residual.push_back(t - 1.0 - 2.0 * (U * U - 0.5) * (rho - 1.0));
  }
  return g;
}

inline std::vector<double> density_profile(const std::vector<double>& xs, const ContinuumTable& tab) {
  return compute_profiles(xs, tab).rho_ratio;
}
inline std::vector<double> velocity_profile(const std::vector<double>& xs, const ContinuumTable& tab) {
  return compute_profiles(xs, tab).u;
}
inline std::vector<double> temperature_profile(const std::vector<double>& xs, const ContinuumTable& tab) {
  return compute_profiles(xs, tab).t_ratio;
}

}  // namespace knudsen

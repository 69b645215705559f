#pragma once

// Dispersion function of the characteristic equation
//
//   lambda(z) = 1 + (z + U)/sqrt(pi) Int exp(-mu^2) q(-U, mu) / (mu - z) dmu
//             = 1 + (z + U) { [2(U^2 - 1/2) z - 2U] lambda_C(z) + (3/2 - U^2) t(z) }
//
// its boundary values lambda^{+/-} = lambda +/- i s on the real axis, and the
// continuous phase theta(mu) = arg lambda^+(mu) on the cut [-U, inf).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "knudsen/constants.hpp"
#include "knudsen/errors.hpp"
#include "knudsen/kernel.hpp"
#include "knudsen/quadrature.hpp"
#include "knudsen/specfun.hpp"

namespace knudsen {

inline Complex lambda_z(Complex z, double U) {
  const double a = 2.0 * (U * U - 0.5);
  const double c = 1.5 - U * U;
  return 1.0 + (z + U) * ((a * z - 2.0 * U) * lambda_c(z) + c * t_func(z));
}

/// lambda(mu) for |mu| >= 20 from the asymptotic series of the Dawson
/// function, D ~ sum_n d_n / (2 mu^{2n+1}), d_n = (2n-1)!!/2^n. The O(1) terms
/// cancel exactly, leaving sum_{p>=3} l_p / mu^p; the direct formula loses
/// the sign of lambda ~ 1/mu^3 to rounding by mu ~ 10^3.
inline double lambda_real_far(double mu, double U) {
  const double a = 2.0 * (U * U - 0.5);
  const double c = 1.5 - U * U;
  std::array<double, 10> d{};
  d[0] = 1.0;
  for (std::size_t n = 1; n < d.size(); ++n) d[n] = d[n - 1] * (2.0 * n - 1.0) / 2.0;
  const double x = 1.0 / mu;
  double sum = 0.0, xp = x * x * x;
  for (int p = 3; p <= 17; ++p, xp *= x) {
    const std::size_t m = static_cast<std::size_t>(p / 2);
    const double l = p % 2 == 0 ? -a * d[m + 1] + (2.0 * U * U - c) * d[m]
                                : -(a * U - 2.0 * U) * d[m + 1] - c * U * d[m];
    sum += l * xp;
  }
  return sum;
}

/// Principal value lambda(mu) on the real axis.
inline double lambda_real(double mu, double U) {
  if (std::abs(mu) >= 20.0) return lambda_real_far(mu, U);
  const double a = 2.0 * (U * U - 0.5);
  const double c = 1.5 - U * U;
  const double d = dawson(mu);
  return 1.0 + (mu + U) * ((a * mu - 2.0 * U) * (1.0 - 2.0 * mu * d) - 2.0 * c * d);
}

/// s(mu) = sqrt(pi) exp(-mu^2) (mu + U) q(-U, mu).
inline double s_func(double mu, double U) {
  return sqrt_pi * std::exp(-mu * mu) * (mu + U) * q_minus_u(U, mu);
}

/// (lambda^+, lambda^-) = lambda(mu) +/- i s(mu).
inline std::pair<Complex, Complex> lambda_boundary(double mu, double U) {
  const double re = lambda_real(mu, U);
  const double im = s_func(mu, U);
  return {{re, im}, {re, -im}};
}

/// Zero of the principal value lambda(mu) far out on the cut.
///
/// lambda ~ -b/mu^3 - c/mu^4 with b = U(U^2 - 3/2), c = (3/2)(U^2 - 1/2), so a
/// real zero sits near mu = -c/b whenever that is positive. It moves to
/// infinity as U approaches 0 from below or |U| approaches sqrt(3/2), and
/// there s(mu) ~ exp(-mu^2) is far below double resolution: theta steps by
/// pi across the zero. Zeros beyond mu = 2 are reported so that quadrature
/// can break there; closer ones are ordinary smooth points of theta.
inline std::optional<double> far_lambda_zero(double U) {
  const double b = U * (U * U - 1.5);
  const double c = 1.5 * (U * U - 0.5);
  if (b == 0.0) return std::nullopt;
  const double est = -c / b;
  if (!(est > 2.0) || est <= -U) return std::nullopt;
  if (est > 1e4) {
    throw NumericalError("dispersion: U = " + std::to_string(U) +
                             " is too close to a regime boundary (lambda vanishes near mu = " +
                             std::to_string(est) + ")",
                         est);
  }
  auto lam = [U](double mu) { return lambda_real(mu, U); };
  // last sign change on a scan; the estimate is only asymptotic
  const double start = std::max(0.3 * est, -U + 1e-9), stop = 1.6 * est + 1.0;
  const int n = 800;
  double lo = 0.0, hi = 0.0;
  bool found = false;
  double prev = lam(start);
  for (int i = 1; i <= n; ++i) {
    const double m = start + (stop - start) * i / n;
    const double v = lam(m);
    if (prev * v <= 0.0) {
      lo = start + (stop - start) * (i - 1) / n;
      hi = m;
      found = true;
    }
    prev = v;
  }
  if (!found) return std::nullopt;
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(lam, lo, hi, boost::math::tools::eps_tolerance<double>(52), iters);
  return 0.5 * (r.first + r.second);
}

/// Default truncation of the cut for "theta at infinity": max(8, U + 8), moved
/// past a far zero of lambda when there is one.
inline double default_mu_max(double U) {
  double m = std::max(8.0, U + 8.0);
  if (const auto z = far_lambda_zero(U)) m = std::max(m, *z + 8.0);
  return m;
}

/// theta(mu) = arg lambda^+(mu), continuous on [-U, inf) with theta(-U) = 0.
///
/// Evaluated as arcctg(lambda/s) in (0, pi) plus a constant offset on each
/// interval between consecutive kernel roots inside the cut. At a root s
/// changes sign while lambda does not vanish, so arcctg jumps between its
/// one-sided limits {0, pi}; the offsets absorb that jump.
class PhaseFunction {
 public:
  explicit PhaseFunction(double U) : U_(U) {
    const KernelRoots kr = kernel_roots(U);
    for (double r : kr.roots())
      if (r > -U) roots_.push_back(r);
    offsets_.assign(roots_.size() + 1, 0.0);
    // sign of s on interval j is sign of q there: q(-U,-U) > 0, simple roots alternate
    for (std::size_t j = 0; j < roots_.size(); ++j) {
      const double lam = lambda_real(roots_[j], U);
      if (std::abs(lam) < 1e-13) {
        throw NumericalError("theta: dispersion function vanishes on the cut at mu = " +
                                 std::to_string(roots_[j]),
                             std::abs(lam));
      }
      const double left = limit(lam, sign_on(j));
      const double right = limit(lam, sign_on(j + 1));
      offsets_[j + 1] = offsets_[j] + left - right;
    }
    lambda_zero_ = far_lambda_zero(U);
    if (lambda_zero_) {
      // width of the band where rounding in lambda exceeds its true value
      const double z = *lambda_zero_, h = 1e-4 * z;
      const double slope = std::abs(lambda_real(z + h, U) - lambda_real(z - h, U)) / (2.0 * h);
      // the far series has relative rounding; the direct formula absolute, O(mu^2)
      const double b = U * (U * U - 1.5), c = 1.5 * (U * U - 0.5);
      const double noise = z >= 20.0 ? 1e-14 * (std::abs(b) + std::abs(c) / z) / (z * z * z) : 1e-13 * z * z;
      noise_band_ = noise / slope;
    }
    far_sign_ = U * (U * U - 1.5) < 0.0 ? 1.0 : -1.0;
    breaks_ = roots_;
    if (lambda_zero_) {
      breaks_.push_back(*lambda_zero_);
      std::sort(breaks_.begin(), breaks_.end());
    }
  }

  double U() const { return U_; }
  /// Kernel roots inside the cut, ascending.
  const std::vector<double>& cut_roots() const { return roots_; }
  std::optional<double> lambda_zero() const { return lambda_zero_; }
  /// Points where theta is not smooth at double resolution: cut roots and a far lambda zero.
  const std::vector<double>& breaks() const { return breaks_; }

  double operator()(double mu) const {
    if (mu < -U_) throw std::domain_error("theta: mu below -U");
    if (mu == -U_) return 0.0;
    const std::size_t j =
        static_cast<std::size_t>(std::upper_bound(roots_.begin(), roots_.end(), mu) - roots_.begin());
    const double lam = lambda_at(mu);
    const double s = s_func(mu, U_);
    if (j > 0 && mu == roots_[j - 1]) return limit(lam, sign_on(j - 1)) + offsets_[j - 1];
    return arcctg(lam, s, sign_on(j)) + offsets_[j];
  }

  /// lambda(mu) on the cut; right at a far zero it is rounding noise, so only
  /// its sign is kept, taken from the side of the zero.
  double lambda_at(double mu) const {
    if (lambda_zero_ && std::abs(mu - *lambda_zero_) < noise_band_)
      return (mu < *lambda_zero_ ? -1.0 : 1.0) * far_sign_ * 1e-13 * mu * mu;
    return lambda_real(mu, U_);
  }

  /// arcctg(lambda/s) with range (0, pi); s == 0 (underflow) mapped to the limit.
  static double arcctg(double lam, double s, int side_sign) {
    if (s == 0.0) return limit(lam, side_sign);
    const double a = std::atan2(s, lam);
    return s > 0.0 ? a : a + pi;
  }

 private:
  static int sign_on(std::size_t j) { return j % 2 == 0 ? 1 : -1; }
  static double limit(double lam, int s_sign) { return lam * s_sign > 0.0 ? 0.0 : pi; }

  double U_;
  std::vector<double> roots_;
  std::vector<double> offsets_;
  std::optional<double> lambda_zero_;
  double far_sign_ = 1.0;  ///< sign of lambda beyond the far zero
  double noise_band_ = 0.0;
  std::vector<double> breaks_;
};

inline double theta(double mu, double U) { return PhaseFunction(U)(mu); }

struct ThetaTable {
  std::vector<double> grid;
  std::vector<double> theta;
  double increment = 0.0;
  double max_step = 0.0;          ///< largest |theta_{i+1} - theta_i|
  double unwrap_discrepancy = 0.0;  ///< max |theta - unwrapped arg(lambda + i s)|
};

/// Tabulates theta on [-U, mu_max] and checks it against the unwrapped
/// argument of lambda^+ on a grid refined until consecutive arguments differ
/// by less than 0.1 rad.
inline ThetaTable build_theta_table(const PhaseFunction& phase, double mu_max,
                                    int initial_points = 400) {
  const double U = phase.U();
  if (!(mu_max > -U)) throw std::domain_error("theta table: mu_max must exceed -U");
  auto raw = [U, &phase](double mu) { return std::atan2(s_func(mu, U), phase.lambda_at(mu)); };
  auto wrap = [](double d) { return std::remainder(d, 2.0 * pi); };

  std::vector<double> grid(initial_points + 1);
  for (int i = 0; i <= initial_points; ++i) grid[i] = -U + (mu_max + U) * i / initial_points;
  for (double r : phase.breaks())
    if (r < mu_max) grid.push_back(r);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  std::vector<double> args(grid.size());
  std::transform(grid.begin(), grid.end(), args.begin(), raw);
  for (int pass = 0; pass < 30; ++pass) {
    std::vector<double> g{grid.front()}, a{args.front()};
    bool refined = false;
    for (std::size_t i = 1; i < grid.size(); ++i) {
      if (std::abs(wrap(args[i] - args[i - 1])) > 0.1 && grid[i] - grid[i - 1] > 1e-12) {
        const double m = 0.5 * (grid[i - 1] + grid[i]);
        g.push_back(m);
        a.push_back(raw(m));
        refined = true;
      }
      g.push_back(grid[i]);
      a.push_back(args[i]);
    }
    grid = std::move(g);
    args = std::move(a);
    if (!refined) break;
  }

  ThetaTable tt;
  tt.grid = grid;
  tt.theta.resize(grid.size());
  double unwrapped = 0.0;
  const auto lz = phase.lambda_zero();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    tt.theta[i] = phase(grid[i]);
    if (i > 0) {
      const double step = tt.theta[i] - tt.theta[i - 1];
      if (lz && grid[i - 1] <= *lz && *lz <= grid[i]) {
        // unresolvable step of pi across the far zero of lambda
        unwrapped += step;
        continue;
      }
      unwrapped += wrap(args[i] - args[i - 1]);
      tt.max_step = std::max(tt.max_step, std::abs(step));
    }
    tt.unwrap_discrepancy = std::max(tt.unwrap_discrepancy, std::abs(tt.theta[i] - unwrapped));
  }
  tt.increment = tt.theta.back() - tt.theta.front();
  if (tt.unwrap_discrepancy > 1e-6 || tt.max_step > 0.5 * pi) {
    throw NumericalError("theta: branch tracking failed (discrepancy " +
                             std::to_string(tt.unwrap_discrepancy) + ", max step " +
                             std::to_string(tt.max_step) + ")",
                         tt.unwrap_discrepancy);
  }
  return tt;
}

inline double theta_increment(double U, double mu_max) {
  if (mu_max < U + 8.0) throw std::domain_error("theta_increment: mu_max must be at least U + 8");
  return build_theta_table(PhaseFunction(U), mu_max).increment;
}

struct DispersionSample {
  double mu;
  double lambda_pv;
  double s;
  double theta;  ///< NaN for mu < -U
};

/// Uniform samples over [mu_min, mu_max]; mu_min defaults to -U.
inline std::vector<DispersionSample> dispersion_samples(double U, double mu_max, int points,
                                                        double mu_min = std::numeric_limits<double>::quiet_NaN()) {
  if (points < 2) throw std::invalid_argument("dispersion_samples: need at least 2 points");
  if (std::isnan(mu_min)) mu_min = -U;
  if (!(mu_max > mu_min)) throw std::invalid_argument("dispersion_samples: empty range");
  const PhaseFunction phase(U);
  std::vector<DispersionSample> out(points);
  for (int i = 0; i < points; ++i) {
    const double mu = i + 1 == points ? mu_max : mu_min + (mu_max - mu_min) * i / (points - 1);
    out[i] = {mu, lambda_real(mu, U), s_func(mu, U),
              mu >= -U ? phase(mu) : std::numeric_limits<double>::quiet_NaN()};
  }
  return out;
}

/// Moment (1/sqrt(pi)) Int exp(-mu^2) mu^m Phi(eta, mu) dmu of the singular
/// eigenfunction Phi(eta, mu) = (eta+U) q(-U,mu) / (eta-mu) + sqrt(pi) exp(eta^2) lambda(eta) delta(eta-mu),
/// with the first term as a principal value. Normalisation gives m = 0 -> 1,
/// and the kernel structure m = 1 -> -U, m = 2 -> U^2.
inline double eigen_moment(int m, double eta, double U, const QuadOptions& opt = {1e-13, 1e-13, 4000}) {
  auto f = [m, U](double mu) { return std::exp(-mu * mu) * std::pow(mu, m) * q_minus_u(U, mu); };
  const double lo = std::min(-12.0, eta - 1.0);
  const double hi = std::max(12.0, eta + 1.0);
  const double pv = cauchy_integral(f, lo, hi, Complex(eta), {}, opt, "eigen_moment").real();
  return -(eta + U) * inv_sqrt_pi * pv + lambda_real(eta, U) * std::pow(eta, m);
}

}  // namespace knudsen

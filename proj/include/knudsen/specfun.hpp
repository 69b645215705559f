#pragma once

// Dawson integral and the Gaussian Cauchy transform
//
//   t(z)        = (1/sqrt(pi)) Int exp(-mu^2) / (mu - z) dmu
//   lambda_C(z) = 1 + z t(z)        (plasma dispersion function)
//
// On the real axis both are principal values and reduce to the Dawson
// integral D(x) = exp(-x^2) Int_0^x exp(s^2) ds:  t(mu) = -2 D(mu).
// Off the axis t(z) = i sqrt(pi) w(z) for Im z > 0, where w is the Faddeeva
// function, evaluated with Weideman's rational approximation (N = 40,
// relative accuracy ~2e-14 in the closed upper half plane). The lower half
// plane follows from Schwarz reflection.

#include <array>
#include <cmath>
#include <complex>
#include <utility>

#include "knudsen/constants.hpp"

namespace knudsen {

using Complex = std::complex<double>;

namespace detail {

inline double dawson_taylor(double x) {
  // D(x) = sum_n (-1)^n 2^n x^(2n+1) / (2n+1)!!
  const double x2 = x * x;
  double term = x;
  double sum = x;
  for (int n = 0; n < 40; ++n) {
    term *= -2.0 * x2 / (2 * n + 3);
    sum += term;
    if (std::abs(term) < 1e-18 * std::abs(sum)) break;
  }
  return sum;
}

inline double dawson_asymptotic(double x) {
  // D(x) ~ 1/(2x) sum_k (2k-1)!! / (2x^2)^k
  const double inv2x2 = 1.0 / (2.0 * x * x);
  double term = 1.0 / (2.0 * x);
  double sum = 0.0;
  for (int k = 0; k < 20; ++k) {
    sum += term;
    const double next = term * (2 * k + 1) * inv2x2;
    if (next < 1e-18 * sum || next > term) break;
    term = next;
  }
  return sum;
}

// Rybicki's sampling-theorem sum, D(x) = lim_{h->0} pi^{-1/2} sum_{n odd}
// exp(-(x - n h)^2) / n, centred on the nearest even grid point.
struct RybickiTable {
  static constexpr double h = 0.2;
  static constexpr int terms = 40;
  std::array<double, terms> gauss{};  // exp(-((2j+1) h)^2)

  RybickiTable() {
    for (int j = 0; j < terms; ++j) {
      const double nh = (2 * j + 1) * h;
      gauss[j] = std::exp(-nh * nh);
    }
  }
};

inline double dawson_rybicki(double x) {
  static const RybickiTable table;
  constexpr double h = RybickiTable::h;
  const int n0 = 2 * static_cast<int>(std::lround(0.5 * x / h));
  const double xp = x - n0 * h;
  const double e1 = std::exp(2.0 * xp * h);
  const double e2 = e1 * e1;
  double up = e1;          // e1^n for odd n
  double down = 1.0 / e1;  // e1^-n
  const double inv_e2 = 1.0 / e2;
  double sum = 0.0;
  for (int j = 0; j < RybickiTable::terms; ++j) {
    const int n = 2 * j + 1;
    sum += table.gauss[j] * (up / (n0 + n) + down / (n0 - n));
    up *= e2;
    down *= inv_e2;
  }
  return std::exp(-xp * xp) * inv_sqrt_pi * sum;
}

struct WeidemanTable {
  static constexpr int n = 40;
  double length;
  std::array<double, n> coef{};  // a_1 .. a_N

  WeidemanTable() {
    constexpr int m = 2 * n;
    length = std::sqrt(n / std::sqrt(2.0));
    std::array<double, 2 * m> samples{};
    // samples[k + m] = f(theta_k), k = -m .. m-1, with f = 0 at k = -m
    for (int k = -m + 1; k < m; ++k) {
      const double t = length * std::tan(0.5 * k * pi / m);
      samples[k + m] = std::exp(-t * t) * (length * length + t * t);
    }
    for (int j = 1; j <= n; ++j) {
      double acc = 0.0;
      for (int k = -m; k < m; ++k) acc += samples[k + m] * std::cos(pi * k * j / m);
      coef[j - 1] = acc / (2 * m);
    }
  }
};

}  // namespace detail

/// Dawson integral D(x) = exp(-x^2) Int_0^x exp(s^2) ds.
inline double dawson(double x) {
  const double ax = std::abs(x);
  double r;
  if (ax < 0.5) {
    return detail::dawson_taylor(x);
  } else if (ax < 10.0) {
    r = detail::dawson_rybicki(ax);
  } else {
    r = detail::dawson_asymptotic(ax);
  }
  return x < 0 ? -r : r;
}

/// Faddeeva function w(z) = exp(-z^2) erfc(-iz) for Im z >= 0.
inline Complex faddeeva_upper(Complex z) {
  static const detail::WeidemanTable table;
  const double L = table.length;
  const Complex iz{-z.imag(), z.real()};
  const Complex den = L - iz;
  const Complex Z = (L + iz) / den;
  Complex p = 0.0;
  for (int j = detail::WeidemanTable::n - 1; j >= 0; --j) p = p * Z + table.coef[j];
  return 2.0 * p / (den * den) + inv_sqrt_pi / den;
}

/// Cauchy transform of the Gaussian. Real arguments give the principal value
/// -2 D(mu); complex arguments the analytic function on either side of the axis.
inline Complex t_func(Complex z) {
  if (z.imag() == 0.0) return {-2.0 * dawson(z.real()), 0.0};
  if (z.imag() > 0.0) return Complex{0.0, sqrt_pi} * faddeeva_upper(z);
  return std::conj(Complex{0.0, sqrt_pi} * faddeeva_upper(std::conj(z)));
}

inline double t_func(double mu) { return -2.0 * dawson(mu); }

/// Plasma dispersion function lambda_C(z) = 1 + z t(z).
inline Complex lambda_c(Complex z) {
  if (z.imag() == 0.0) return {1.0 - 2.0 * z.real() * dawson(z.real()), 0.0};
  return 1.0 + z * t_func(z);
}

inline double lambda_c(double mu) { return 1.0 - 2.0 * mu * dawson(mu); }

/// Boundary values lambda_C^{+/-}(mu) from above/below the real axis.
inline std::pair<Complex, Complex> lambda_c_boundary(double mu) {
  const double re = lambda_c(mu);
  const double jump = sqrt_pi * mu * std::exp(-mu * mu);
  return {{re, jump}, {re, -jump}};
}

}  // namespace knudsen

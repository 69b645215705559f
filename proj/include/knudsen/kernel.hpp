#pragma once

// Kernel of the linearized one-dimensional BGK equation and the classification
// of the drift speed U (units of sqrt(2 R T_inf)).

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string_view>
#include <utility>

#include "knudsen/constants.hpp"

namespace knudsen {

/// Tolerance used to detect U = 0, |U| = sqrt(3/2) and U^2 = 1/2.
inline constexpr double regime_tolerance = 1e-12;

enum class Regime {
  NoSolution,                // U > sqrt(3/2), index 3
  UniqueEvaporation,         // 0 < U < sqrt(3/2), index 2
  DegenerateHalfSqrt2,       // U = 1/sqrt(2), index 2, linear kernel
  OneParameterCondensation,  // -sqrt(3/2) < U < 0, index 1
  TwoParameterCondensation,  // U < -sqrt(3/2), index 0
  DiscreteBoundary,          // U = 0 or U^2 = 3/2: infinity is a fourth-order zero
};

constexpr std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::NoSolution: return "NoSolution";
    case Regime::UniqueEvaporation: return "UniqueEvaporation";
    case Regime::DegenerateHalfSqrt2: return "DegenerateHalfSqrt2";
    case Regime::OneParameterCondensation: return "OneParameterCondensation";
    case Regime::TwoParameterCondensation: return "TwoParameterCondensation";
    case Regime::DiscreteBoundary: return "DiscreteBoundary";
  }
  return "?";
}

/// Index of the Riemann problem (increment of theta over the cut, in units of pi).
/// DiscreteBoundary has no index; returns -1.
constexpr int regime_index(Regime r) {
  switch (r) {
    case Regime::NoSolution: return 3;
    case Regime::UniqueEvaporation:
    case Regime::DegenerateHalfSqrt2: return 2;
    case Regime::OneParameterCondensation: return 1;
    case Regime::TwoParameterCondensation: return 0;
    case Regime::DiscreteBoundary: return -1;
  }
  return -1;
}

/// q(mu, mu') = 1 + 2 mu mu' + 2 (mu^2 - 1/2)(mu'^2 - 1/2).
inline double q_full(double mu, double mup) {
  return 1.0 + 2.0 * mu * mup + 2.0 * (mu * mu - 0.5) * (mup * mup - 0.5);
}

/// q(-U, mu) = 1 - 2 U mu + 2 (U^2 - 1/2)(mu^2 - 1/2).
template <class T>
T q_minus_u(double U, T mu) {
  return 1.0 - 2.0 * U * mu + 2.0 * (U * U - 0.5) * (mu * mu - 0.5);
}

/// D(U) = 2 (U^2 - 3/4)^2 + 3/8, the reduced discriminant of q(-U, .).
inline double discriminant(double U) {
  const double d = U * U - 0.75;
  return 2.0 * d * d + 0.375;
}

inline bool is_degenerate_speed(double U, double tol = regime_tolerance) {
  return std::abs(U * U - 0.5) < tol;
}

struct KernelRoots {
  std::array<double, 2> values{};
  std::size_t count = 0;
  bool degenerate = false;  ///< q(-U, .) is affine (U^2 = 1/2)

  std::span<const double> roots() const& { return {values.data(), count}; }
  std::span<const double> roots() const&& = delete;
};

/// Real zeros of q(-U, mu), ascending.
inline KernelRoots kernel_roots(double U) {
  KernelRoots kr;
  if (is_degenerate_speed(U)) {
    kr.degenerate = true;
    kr.count = 1;
    kr.values[0] = 1.0 / (2.0 * U);
    return kr;
  }
  // a mu^2 - 2 U mu + c with a = 2(U^2 - 1/2), c = 3/2 - U^2; roots (U +- sqrt D)/a.
  // The root that survives a -> 0 is taken from the product c/a.
  const double a = 2.0 * (U * U - 0.5);
  const double c = 1.5 - U * U;
  const double sd = std::sqrt(discriminant(U));
  const double t = U >= 0.0 ? U + sd : U - sd;
  double r1 = t / a;
  double r2 = c / t;
  if (r1 > r2) std::swap(r1, r2);
  kr.count = 2;
  kr.values = {r1, r2};
  return kr;
}

inline Regime classify_regime(double U) {
  const double au = std::abs(U);
  if (au < regime_tolerance || std::abs(au - sonic_speed) < regime_tolerance)
    return Regime::DiscreteBoundary;
  if (std::abs(U - inv_sqrt2) < regime_tolerance) return Regime::DegenerateHalfSqrt2;
  if (U > sonic_speed) return Regime::NoSolution;
  if (U > 0.0) return Regime::UniqueEvaporation;
  if (U > -sonic_speed) return Regime::OneParameterCondensation;
  return Regime::TwoParameterCondensation;
}

}  // namespace knudsen

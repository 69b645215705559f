#pragma once

#include <numbers>

namespace knudsen {

inline constexpr double pi = std::numbers::pi;
inline constexpr double sqrt_pi = 1.7724538509055160273;
inline constexpr double inv_sqrt_pi = std::numbers::inv_sqrtpi;
inline constexpr double sqrt2 = std::numbers::sqrt2;
inline constexpr double inv_sqrt2 = 0.70710678118654752440;

/// Sonic speed of the one-dimensional gas, U = sqrt(3/2) (Mach 1).
inline constexpr double sonic_speed = 1.2247448713915890491;

}  // namespace knudsen

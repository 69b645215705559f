#pragma once

// Physical units for the dimensionless problem. Speeds are measured in
// sqrt(2 R T_inf) and lengths in sqrt(2 R T_inf) / nu.

#include <cmath>
#include <optional>
#include <stdexcept>

namespace knudsen {

struct PhysicalScales {
  double nu = 0.0;       ///< collision frequency, 1/s
  double T_inf = 0.0;    ///< K
  double rho_inf = 0.0;  ///< any density unit; only carried through
  double R_gas = 0.0;    ///< specific gas constant, J/(kg K)
  double v_inf = 0.0;    ///< drift speed, m/s (signed, > 0 away from the wall)

  void validate() const {
    if (!(T_inf > 0.0) || !std::isfinite(T_inf)) throw std::invalid_argument("T_inf must be positive");
    if (!(R_gas > 0.0) || !std::isfinite(R_gas)) throw std::invalid_argument("R_gas must be positive");
    if (!(nu > 0.0) || !std::isfinite(nu)) throw std::invalid_argument("nu must be positive");
    if (!(rho_inf > 0.0) || !std::isfinite(rho_inf)) throw std::invalid_argument("rho_inf must be positive");
    if (!std::isfinite(v_inf)) throw std::invalid_argument("v_inf must be finite");
  }

  /// sqrt(2 R T_inf)
  double thermal_speed() const { return std::sqrt(2.0 * R_gas * T_inf); }
  /// sqrt(2 R T_inf) / nu, the unit of the dimensionless x
  double length_unit() const { return thermal_speed() / nu; }

  double dimensionless_speed() const { return v_inf / thermal_speed(); }
  double dimensionless_x(double x_phys) const { return x_phys / length_unit(); }
  double physical_x(double x1) const { return x1 * length_unit(); }
};

/// U = v / sqrt(2 R T)
inline double speed_to_u(double v, double R_gas, double T) {
  if (!(R_gas > 0.0) || !(T > 0.0)) throw std::invalid_argument("R_gas and T must be positive");
  return v / std::sqrt(2.0 * R_gas * T);
}

/// v = U sqrt(2 R T)
inline double u_to_speed(double U, double R_gas, double T) {
  if (!(R_gas > 0.0) || !(T > 0.0)) throw std::invalid_argument("R_gas and T must be positive");
  return U * std::sqrt(2.0 * R_gas * T);
}

}  // namespace knudsen

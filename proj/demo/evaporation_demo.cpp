// Evaporation of water vapour from a flat surface: jumps, a density profile and
// a slab-oracle check, all through the header-only library.

#include <cstdio>

#include "knudsen/knudsen.hpp"

using namespace knudsen;

int main() {
  // 40 m/s drift of vapour at 350 K, nu = 1e9 1/s
  PhysicalScales ps{1e9, 350.0, 0.26, 461.5, 40.0};
  ps.validate();
  const double U = ps.dimensionless_speed();
  std::printf("U = %.5f, mean free path unit = %.3e m\n\n", U, ps.length_unit());

  const JumpResult jr = solve_jumps({U});
  std::printf("eps_T = %.6f  eps_rho = %.6f  (K = %.5f, R = %.5f)\n", *jr.eps_T, *jr.eps_rho, *jr.K, *jr.R);
  std::printf("surface temperature T_s = %.2f K\n\n", ps.T_inf * (1.0 + *jr.eps_T));

  const auto tab = build_continuum_table(jr);
  const std::vector<double> xs = {0.0, 0.1, 0.5, 1.0, 2.0, 5.0};
  const auto g = compute_profiles(xs, tab);
  std::printf("%8s %10s %12s %10s\n", "x [um]", "rho/rho_0", "u [m/s]", "T/T_0");
  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::printf("%8.3f %10.6f %12.4f %10.6f\n", ps.physical_x(xs[i]) * 1e6, g.rho_ratio[i],
                g.u[i] * ps.thermal_speed(), g.t_ratio[i]);
  }

  OracleOptions o;
  o.double_L = false;
  const OracleSolution s = fit_jumps(U, o);
  std::printf("\nslab oracle: eps_T = %.6f  eps_rho = %.6f  (far-field residual %.1e)\n", s.eps_T_fit, s.eps_rho_fit,
              s.farfield_residual);

  // past sqrt(3/2) there is no decaying solution
  const JumpResult none = solve_jumps({2.0});
  std::printf("U = 2: %s\n", none.message.c_str());
}

// Thermal baths at positive temperature: compares the density-matrix
// concurrence (which dies at a finite time) with the trajectory average for
// photon counting and for the best jump unraveling.

#include <cstdio>
#include <numbers>

#include "trajent/trajent.hpp"

int main() {
  using namespace trajent;
  const ThermalRates rates{1.0, 2.0, 1.0, 2.0};
  const auto init = states::bell_phi(std::numbers::pi / 2);
  const Scenario counting = preset_thermal(rates).with_initial(init);
  const Scenario rotated = preset_rotated_thermal(balanced_mixing(), balanced_mixing(), rates).with_initial(init);

  std::printf("kappa_qj (photon counting) = %.6f\n", kappa_qj(counting));
  std::printf("kappa_qj (balanced mixing) = %.6f\n", kappa_qj(rotated));
  std::printf("closed-form optimum        = %.6f\n\n", kappa_opt_thermal(rates));

  EnsembleOptions opt;
  opt.n_traj = 500;
  opt.seed = 2024;
  const double t_max = 1.0, dt = 1e-3, grid = 0.1;
  const auto rho = evolve_rho(counting, t_max, dt, grid);
  const auto qj = run_ensemble(counting, Unraveling::QuantumJump, t_max, dt, grid, opt);
  const auto best = run_ensemble(rotated, Unraveling::QuantumJump, t_max, dt, grid, opt);

  std::printf("%6s %10s %10s %10s\n", "t", "C_rho", "C_counting", "C_best");
  for (std::size_t k = 0; k < rho.times.size(); ++k)
    std::printf("%6.2f %10.5f %10.5f %10.5f\n", rho.times[k], concurrence_mixed(rho.states[k]),
                qj.summary.mean_c[k], best.summary.mean_c[k]);
  return 0;
}

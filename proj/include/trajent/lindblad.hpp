// lindblad.hpp - master-equation baseline and mixed-state concurrence.

#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <spdlog/spdlog.h>

#include "trajent/errors.hpp"
#include "trajent/linalg.hpp"
#include "trajent/model.hpp"
#include "trajent/trajectory.hpp"

namespace trajent {

inline constexpr double kDensityHermTol = 1e-9;
inline constexpr double kDensityTraceTol = 1e-9;
inline constexpr double kDensityNegTol = 1e-8;

struct DensityMatrix {
  Mat4 rho;
};

inline std::vector<std::string> density_violations(const Mat4& rho) {
  std::vector<std::string> out;
  if (!all_finite(rho)) {
    out.emplace_back("non-finite entries");
    return out;
  }
  if (hermiticity_defect(rho) > kDensityHermTol) out.emplace_back("not Hermitian");
  if (std::abs(trace(rho) - 1.0) > kDensityTraceTol) out.emplace_back("trace != 1");
  if (out.empty()) {
    const auto e = herm_eig4(rho, kDensityHermTol);
    if (e.values[3] < -kDensityNegTol) out.emplace_back("negative eigenvalue " + std::to_string(e.values[3]));
  }
  return out;
}

inline Mat4 lindblad_rhs(const Mat4& rho, const Scenario& s, double t = 0.0) { return apply_generator(s, rho, t); }

struct MasterSolution {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  double max_trace_drift = 0.0;  // largest per-step |tr rho - 1| before renormalization
};

inline constexpr double kMasterRateStep = 0.05;

// Classical RK4 on the Lindblad equation, trace renormalized each step.
inline MasterSolution evolve_rho(const Scenario& s, double t_max, double dt, double record_grid,
                                 std::optional<Mat4> rho0 = std::nullopt) {
  if (dt * s.max_rate() > kMasterRateStep) throw ConfigError("evolve_rho: dt * gamma_max must be <= 0.05");
  const TimeGrid grid = make_time_grid(t_max, dt, record_grid);
  const double h = grid.dt;

  Mat4 rho = rho0 ? *rho0 : s.initial().projector();
  if (auto bad = density_violations(rho); !bad.empty())
    throw ConfigError("evolve_rho: invalid initial density matrix (" + bad.front() + ")");

  MasterSolution sol;
  sol.times = grid.times;
  sol.states.reserve(grid.times.size());
  sol.states.push_back({rho});

  auto check_positive = [](const Mat4& r, double t) {
    const auto e = herm_eig4(r, 1e-8);
    if (e.values[3] < -1e-6) {
      std::ostringstream os;
      os << "evolve_rho: positivity lost at t=" << t << " (min eigenvalue " << e.values[3] << ")";
      throw NumericalError(os.str());
    }
  };

  double t = 0.0;
  for (std::size_t k = 1; k < grid.times.size(); ++k) {
    for (std::size_t i = 0; i < grid.substeps; ++i) {
      const Mat4 k1 = lindblad_rhs(rho, s, t);
      const Mat4 k2 = lindblad_rhs(rho + cplx(0.5 * h) * k1, s, t + 0.5 * h);
      const Mat4 k3 = lindblad_rhs(rho + cplx(0.5 * h) * k2, s, t + 0.5 * h);
      const Mat4 k4 = lindblad_rhs(rho + cplx(h) * k3, s, t + h);
      rho += cplx(h / 6.0) * (k1 + cplx(2.0) * k2 + cplx(2.0) * k3 + k4);
      rho = cplx(0.5) * (rho + adjoint(rho));
      const cplx tr = trace(rho);
      const double drift = std::abs(tr - 1.0);
      sol.max_trace_drift = std::max(sol.max_trace_drift, drift);
      if (drift > 1e-8) throw NumericalError("evolve_rho: trace drift " + std::to_string(drift) + " in one step");
      rho *= cplx(1.0 / tr.real());
      t = grid.times[k - 1] + static_cast<double>(i + 1) * h;
    }
    t = grid.times[k];
    check_positive(rho, t);
    sol.states.push_back({rho});
  }
  spdlog::debug("evolve_rho: {} records, max per-step trace drift {:.3e}", sol.states.size(), sol.max_trace_drift);
  return sol;
}

// Wootters concurrence max(0, l1 - l2 - l3 - l4), where l_k are the singular
// values of sqrt(rho) (sy x sy) conj(sqrt(rho)); their squares are the
// eigenvalues of sqrt(rho) rho~ sqrt(rho). The singular values are read off
// the 8x8 Hermitian dilation [[0, A], [A^dagger, 0]] so that no square root
// of a round-off-sized eigenvalue enters the result.
inline double concurrence_mixed(const Mat4& rho) {
  if (auto bad = density_violations(rho); !bad.empty())
    throw ConfigError("concurrence_mixed: invalid density matrix (" + bad.front() + ")");
  const auto e = herm_eig4(rho, kDensityHermTol);
  const Mat4 sqrt_rho = hermitian_function(e, [](double x) { return std::sqrt(std::max(x, 0.0)); });
  const Mat4 a = sqrt_rho * spin_flip() * conjugate(sqrt_rho);

  SquareMatrix<8> dilation;
  for (std::size_t i = 0; i < 4; ++i)
    for (std::size_t j = 0; j < 4; ++j) {
      dilation(i, 4 + j) = a(i, j);
      dilation(4 + j, i) = std::conj(a(i, j));
    }
  const auto d = herm_eig(dilation, 1e-12);
  // Descending: the first four are the singular values.
  const double c = d.values[0] - d.values[1] - d.values[2] - d.values[3];
  return std::clamp(c, 0.0, 1.0);
}

inline double concurrence_mixed(const DensityMatrix& d) { return concurrence_mixed(d.rho); }

}  // namespace trajent

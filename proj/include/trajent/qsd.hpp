// qsd.hpp - Euler-Maruyama integrators for diffusive unravelings.
//
// Homodyne detection (real Wiener increments dw, E[dw^2] = dt):
//   d psi = [(-i H0 - K) dt
//            + sum gamma (Re<J> J - (Re<J>)^2 / 2) dt
//            + sum sqrt(gamma) (J - Re<J>) dw] psi
//
// Heterodyne detection (complex dxi, E[dxi dxi*] = dt, E[dxi dxi] = 0):
//   d psi = [(-i H0 - K) dt
//            + 1/2 sum gamma (<J>* J - |<J>|^2 / 2) dt
//            + sum sqrt(gamma) ((J - <J>/2) dxi - <J>*/2 dxi*)] psi
//
// Both integrate the unshifted channel operators (the strong local-oscillator
// limit); laser phases are applied beforehand with with_laser_phases. The
// state is renormalized after every step.

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "trajent/entanglement.hpp"
#include "trajent/errors.hpp"
#include "trajent/linalg.hpp"
#include "trajent/model.hpp"
#include "trajent/random.hpp"
#include "trajent/trajectory.hpp"

namespace trajent {

enum class DiffusionKind { Homodyne, Heterodyne };

inline constexpr double kMaxDiffusionRateStep = 1e-2;

// One real Gaussian per channel with variance dt.
inline double sample_homodyne_noise(TrajectoryRng& rng, double dt) { return std::sqrt(dt) * rng.normal(); }

// (dw1 + i dw2) / sqrt 2 with independent dw of variance dt.
inline cplx sample_heterodyne_noise(TrajectoryRng& rng, double dt) {
  const double s = std::sqrt(0.5 * dt);
  const double re = rng.normal();
  const double im = rng.normal();
  return {s * re, s * im};
}

class DiffusionStepper {
 public:
  DiffusionStepper(const Scenario& s, DiffusionKind kind, double dt) : scenario_(s), kind_(kind), dt_(dt) {
    if (!(dt > 0.0)) throw ConfigError("qsd: dt must be positive");
    for (const auto& c : s.channels())
      if (!(c.rate >= 0.0)) throw ConfigError("qsd: channel '" + c.id + "' has a negative rate");
    if (dt * s.max_rate() > kMaxDiffusionRateStep)
      throw ConfigError("qsd: step too large (dt * gamma_max must be <= 1e-2)");
    drift_ = (-kI) * s.h0() - s.damping_base();
    for (const auto& c : s.channels()) {
      if (c.rate == 0.0) continue;
      ops_.push_back(c.lifted_base());
      rates_.push_back(c.rate);
      sqrt_rates_.push_back(std::sqrt(c.rate));
    }
  }

  double dt() const { return dt_; }
  DiffusionKind kind() const { return kind_; }
  const Scenario& scenario() const { return scenario_; }

  void step(Vec4& psi, TrajectoryRng& rng) const {
    Vec4 dpsi = (drift_ * psi) * cplx(dt_);
    for (std::size_t m = 0; m < ops_.size(); ++m) {
      const Vec4 jpsi = ops_[m] * psi;
      const cplx mean = inner(psi, jpsi);
      const double g = rates_[m];
      const double sg = sqrt_rates_[m];
      if (kind_ == DiffusionKind::Homodyne) {
        const double r = mean.real();
        const double dw = sample_homodyne_noise(rng, dt_);
        dpsi += jpsi * cplx(g * r * dt_ + sg * dw);
        dpsi -= psi * cplx(0.5 * g * r * r * dt_ + sg * r * dw);
      } else {
        const cplx dxi = sample_heterodyne_noise(rng, dt_);
        dpsi += jpsi * (0.5 * g * std::conj(mean) * dt_ + sg * dxi);
        dpsi -= psi * (0.25 * g * std::norm(mean) * dt_ + 0.5 * sg * (mean * dxi + std::conj(mean) * std::conj(dxi)));
      }
    }
    psi += dpsi;
    const double n = norm(psi);
    if (!(n > 0.0) || !std::isfinite(n)) throw NumericalError("qsd: state collapsed to zero or diverged");
    psi *= cplx(1.0 / n);
  }

 private:
  Scenario scenario_;
  DiffusionKind kind_;
  double dt_;
  Mat4 drift_;
  std::vector<Mat4> ops_;
  std::vector<double> rates_;
  std::vector<double> sqrt_rates_;
};

inline QubitPairState step_homodyne(const QubitPairState& state, const Scenario& s, double dt, TrajectoryRng& rng) {
  DiffusionStepper stepper(s, DiffusionKind::Homodyne, dt);
  Vec4 psi = state.vec();
  stepper.step(psi, rng);
  return QubitPairState::normalized(psi);
}

inline QubitPairState step_heterodyne(const QubitPairState& state, const Scenario& s, double dt, TrajectoryRng& rng) {
  DiffusionStepper stepper(s, DiffusionKind::Heterodyne, dt);
  Vec4 psi = state.vec();
  stepper.step(psi, rng);
  return QubitPairState::normalized(psi);
}

inline TrajectoryRecord run_trajectory_qsd(const DiffusionStepper& stepper, const TimeGrid& grid, std::uint64_t seed,
                                           bool keep_states = false) {
  TrajectoryRng rng(seed);
  TrajectoryRecord rec;
  rec.seed = seed;
  rec.times = grid.times;
  rec.concurrences.reserve(grid.times.size());
  Vec4 psi = stepper.scenario().initial().vec();
  auto record = [&] {
    rec.concurrences.push_back(concurrence_of_direction(psi));
    if (keep_states) rec.states.push_back(psi);
  };
  record();
  for (std::size_t k = 1; k < grid.times.size(); ++k) {
    for (std::size_t i = 0; i < grid.substeps; ++i) stepper.step(psi, rng);
    record();
  }
  return rec;
}

inline TrajectoryRecord run_trajectory_qsd(DiffusionKind kind, const Scenario& s, double t_max, double dt,
                                           std::uint64_t seed, double record_grid, bool keep_states = false) {
  const TimeGrid grid = make_time_grid(t_max, dt, record_grid);
  const DiffusionStepper stepper(s, kind, grid.dt);
  return run_trajectory_qsd(stepper, grid, seed, keep_states);
}

}  // namespace trajent

// qj.hpp - Monte Carlo quantum-jump trajectories.
//
// Fixed-step sampling with one uniform draw per step. The no-jump branch is
// the normalized e^{-i H_eff dt} psi, taken with probability
// ||e^{-i H_eff dt} psi||^2, so per-step survival factors multiply to the
// exact no-jump probability. On a jump, the channel is chosen with weight
// gamma_m ||J_m psi||^2 using operators evaluated at the start of the step.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "trajent/entanglement.hpp"
#include "trajent/errors.hpp"
#include "trajent/linalg.hpp"
#include "trajent/model.hpp"
#include "trajent/random.hpp"
#include "trajent/trajectory.hpp"

namespace trajent {

inline constexpr double kMaxStepJumpProbability = 0.1;

class QuantumJumpStepper {
 public:
  QuantumJumpStepper(const Scenario& s, double dt) : scenario_(s), dt_(dt) {
    if (!(dt > 0.0)) throw ConfigError("step_qj: dt must be positive");
    for (const auto& c : s.channels())
      if (!(c.rate >= 0.0)) throw ConfigError("step_qj: channel '" + c.id + "' has a negative rate");
    if (s.time_dependent() && max_abs_entry(s.damping_at(0.731 * dt + 0.5) - s.damping()) > 1e-10)
      throw ConfigError("step_qj: time-dependent channels must leave K constant (pair heterodyne shifts)");
    propagator_ = expm((-kI * dt) * s.effective_hamiltonian());
    two_k_ = 2.0 * s.damping();
    lifted_.reserve(s.channels().size());
    for (const auto& c : s.channels()) lifted_.push_back(c.lifted(0.0));
  }

  double dt() const { return dt_; }
  const Scenario& scenario() const { return scenario_; }

  // Total first-order jump probability sum_m gamma_m ||J_m psi||^2 dt.
  double jump_probability_estimate(const Vec4& psi) const { return expectation(two_k_, psi).real() * dt_; }

  // Advances psi (unit norm) by one step starting at time t.
  std::optional<JumpEvent> step(Vec4& psi, double t, TrajectoryRng& rng) const {
    if (jump_probability_estimate(psi) > kMaxStepJumpProbability)
      throw ConfigError("step_qj: dt too large (per-step jump probability exceeds 0.1)");

    Vec4 next = propagator_ * psi;
    const double survive = squared_norm(next);
    double p_jump = 1.0 - survive;
    if (p_jump < 1e-14) p_jump = 0.0;

    const double r = rng.uniform();
    if (r >= p_jump) {
      psi = next * cplx(1.0 / std::sqrt(survive));
      return std::nullopt;
    }

    const auto& channels = scenario_.channels();
    std::vector<double> weights(channels.size());
    std::vector<Vec4> images(channels.size());
    double total = 0.0;
    for (std::size_t m = 0; m < channels.size(); ++m) {
      const Mat4 j = channels[m].time_dependent() ? channels[m].lifted(t) : lifted_[m];
      images[m] = j * psi;
      weights[m] = channels[m].rate * squared_norm(images[m]);
      total += weights[m];
    }
    if (!(total > 0.0)) throw NumericalError("step_qj: jump drawn but every channel annihilates the state");

    const double target = (r / p_jump) * total;
    double acc = 0.0;
    std::size_t chosen = channels.size();
    for (std::size_t m = 0; m < channels.size(); ++m) {
      if (weights[m] <= 0.0) continue;
      chosen = m;
      acc += weights[m];
      if (target < acc) break;
    }
    const double n2 = squared_norm(images[chosen]);
    if (!(n2 > 0.0)) throw NumericalError("step_qj: selected channel annihilates the state");
    psi = images[chosen] * cplx(1.0 / std::sqrt(n2));
    return JumpEvent{t, chosen, channels[chosen].id};
  }

 private:
  Scenario scenario_;
  double dt_;
  Mat4 propagator_;
  Mat4 two_k_;
  std::vector<Mat4> lifted_;
};

// One step from a state; builds the propagator on every call. Use
// QuantumJumpStepper when stepping repeatedly.
inline std::pair<QubitPairState, std::optional<JumpEvent>> step_qj(const QubitPairState& state, const Scenario& s,
                                                                   double t, double dt, TrajectoryRng& rng) {
  QuantumJumpStepper stepper(s, dt);
  Vec4 psi = state.vec();
  auto ev = stepper.step(psi, t, rng);
  return {QubitPairState::normalized(psi), ev};
}

inline TrajectoryRecord run_trajectory(const QuantumJumpStepper& stepper, const TimeGrid& grid, std::uint64_t seed,
                                       bool keep_states = false) {
  const Scenario& s = stepper.scenario();
  TrajectoryRng rng(seed);
  TrajectoryRecord rec;
  rec.seed = seed;
  rec.times = grid.times;
  rec.concurrences.reserve(grid.times.size());
  if (keep_states) rec.states.reserve(grid.times.size());

  Vec4 psi = s.initial().vec();
  auto record = [&] {
    rec.concurrences.push_back(concurrence_of_direction(psi));
    if (keep_states) rec.states.push_back(psi);
  };
  record();
  double t = 0.0;
  for (std::size_t k = 1; k < grid.times.size(); ++k) {
    for (std::size_t i = 0; i < grid.substeps; ++i) {
      if (auto ev = stepper.step(psi, t, rng)) rec.events.push_back(std::move(*ev));
      t = grid.times[k - 1] + static_cast<double>(i + 1) * grid.dt;
    }
    t = grid.times[k];
    record();
  }
  return rec;
}

inline TrajectoryRecord run_trajectory(const Scenario& s, double t_max, double dt, std::uint64_t seed,
                                       double record_grid, bool keep_states = false) {
  const TimeGrid grid = make_time_grid(t_max, dt, record_grid);
  const QuantumJumpStepper stepper(s, grid.dt);
  return run_trajectory(stepper, grid, seed, keep_states);
}

// ||e^{-i H_eff t} psi||^2.
inline double survival_probability(const Scenario& s, const QubitPairState& state, double t) {
  if (!(t >= 0.0)) throw ConfigError("survival_probability: t must be >= 0");
  if (s.time_dependent()) throw ConfigError("survival_probability: time-dependent (heterodyne) channels not supported");
  return squared_norm(expm((-kI * t) * s.effective_hamiltonian()) * state.vec());
}

}  // namespace trajent

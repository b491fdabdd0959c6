#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "trajent/errors.hpp"
#include "trajent/linalg.hpp"

namespace trajent {

struct JumpEvent {
  double time = 0.0;
  std::size_t channel = 0;
  std::string channel_id;
};

struct TrajectoryRecord {
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::vector<Vec4> states;  // empty unless retention was requested
  std::vector<double> concurrences;
  std::vector<JumpEvent> events;
};

// Recording grid t_k = k * stride, k = 0..n, with an integer number of
// integration steps per stride. The step actually used is stride / substeps,
// never larger than the requested dt.
struct TimeGrid {
  std::vector<double> times;
  std::size_t substeps = 1;
  double dt = 0.0;
};

inline TimeGrid make_time_grid(double t_max, double dt, double stride) {
  if (!(dt > 0.0) || !(stride >= dt * (1.0 - 1e-12)) || !(t_max >= stride * (1.0 - 1e-12)))
    throw ConfigError("time grid requires 0 < dt <= record_grid <= t_max");
  TimeGrid g;
  const auto n = static_cast<std::size_t>(std::floor(t_max / stride + 1e-9));
  g.times.reserve(n + 1);
  for (std::size_t k = 0; k <= n; ++k) g.times.push_back(static_cast<double>(k) * stride);
  g.substeps = static_cast<std::size_t>(std::max(1.0, std::ceil(stride / dt - 1e-9)));
  g.dt = stride / static_cast<double>(g.substeps);
  return g;
}

}  // namespace trajent

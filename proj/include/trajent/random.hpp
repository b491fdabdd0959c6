// random.hpp - reproducible per-trajectory random streams.
//
// Trajectory k of an ensemble seeded with S draws from a std::mt19937_64
// whose seed is splitmix64(S ^ splitmix64(k)). Streams depend only on
// (S, k), so ensembles can be split across workers without changing output.

#pragma once

#include <cstdint>
#include <random>

namespace trajent {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64(master ^ splitmix64(index));
}

class TrajectoryRng {
 public:
  explicit TrajectoryRng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1).
  double uniform() { return std::generate_canonical<double, 53>(engine_); }

  // Standard normal.
  double normal() { return normal_(engine_); }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace trajent

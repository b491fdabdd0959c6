// ensemble.hpp - seeded, optionally parallel trajectory ensembles.
//
// Trajectory k uses seed substream_seed(master, k). Trajectories are grouped
// into fixed blocks of kBlockSize consecutive indices; each block is summed
// sequentially and the blocks are reduced pairwise in index order, so the
// summary is bit-identical for any worker count.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "trajent/model.hpp"
#include "trajent/qj.hpp"
#include "trajent/qsd.hpp"
#include "trajent/random.hpp"
#include "trajent/stats.hpp"
#include "trajent/trajectory.hpp"

namespace trajent {

enum class Unraveling { QuantumJump, HomodyneDiffusion, HeterodyneDiffusion };

struct EnsembleOptions {
  std::size_t n_traj = 1000;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: hardware concurrency
  bool keep_states = false;
  bool keep_records = false;
};

struct EnsembleResult {
  EnsembleSummary summary;
  std::vector<TrajectoryRecord> records;  // only with keep_records
};

inline constexpr std::size_t kBlockSize = 64;

inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// make_record(seed) -> TrajectoryRecord, must be safe to call concurrently.
template <typename MakeRecord>
EnsembleResult run_ensemble(MakeRecord&& make_record, const std::vector<double>& times, const EnsembleOptions& opt) {
  if (opt.n_traj == 0) throw ConfigError("ensemble: n_traj must be >= 1");
  const std::size_t blocks = (opt.n_traj + kBlockSize - 1) / kBlockSize;
  const bool with_rho = opt.keep_states;
  std::vector<EnsemblePartial> partials(blocks, EnsemblePartial(times.size(), with_rho));
  std::vector<TrajectoryRecord> records(opt.keep_records ? opt.n_traj : 0);

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t b = next.fetch_add(1);
      if (b >= blocks) return;
      try {
        const std::size_t lo = b * kBlockSize;
        const std::size_t hi = std::min(opt.n_traj, lo + kBlockSize);
        for (std::size_t k = lo; k < hi; ++k) {
          TrajectoryRecord r = make_record(substream_seed(opt.seed, k));
          partials[b].add(r);
          if (opt.keep_records) records[k] = std::move(r);
        }
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(blocks);
        return;
      }
    }
  };

  const unsigned n_threads = std::min<unsigned>(resolve_threads(opt.threads), static_cast<unsigned>(blocks));
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (unsigned i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  EnsembleResult out;
  out.summary = summarize(times, pairwise_reduce(partials, 0, partials.size()));
  out.records = std::move(records);
  return out;
}

inline EnsembleResult run_ensemble(const Scenario& s, Unraveling kind, double t_max, double dt, double record_grid,
                                   const EnsembleOptions& opt) {
  const TimeGrid grid = make_time_grid(t_max, dt, record_grid);
  const bool keep = opt.keep_states;
  if (kind == Unraveling::QuantumJump) {
    const QuantumJumpStepper stepper(s, grid.dt);
    return run_ensemble([&](std::uint64_t seed) { return run_trajectory(stepper, grid, seed, keep); }, grid.times,
                        opt);
  }
  const DiffusionStepper stepper(
      s, kind == Unraveling::HomodyneDiffusion ? DiffusionKind::Homodyne : DiffusionKind::Heterodyne, grid.dt);
  return run_ensemble([&](std::uint64_t seed) { return run_trajectory_qsd(stepper, grid, seed, keep); }, grid.times,
                      opt);
}

}  // namespace trajent

#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "test_util.hpp"
#include "trajent/analytics.hpp"
#include "trajent/ensemble.hpp"
#include "trajent/lindblad.hpp"
#include "trajent/model.hpp"

using namespace trajent;

namespace {

EnsembleResult qj(const Scenario& s, std::size_t n, double t_max, double dt, double grid, std::uint64_t seed,
                  unsigned threads = 1, bool keep_states = false, bool keep_records = false) {
  EnsembleOptions o;
  o.n_traj = n;
  o.seed = seed;
  o.threads = threads;
  o.keep_states = keep_states;
  o.keep_records = keep_records;
  return run_ensemble(s, Unraveling::QuantumJump, t_max, dt, grid, o);
}

QubitPairState fig1_state() { return QubitPairState(cplx(1.0 / std::sqrt(2.0)), 0, 0, cplx(0.0, -1.0 / std::sqrt(2.0))); }

}  // namespace

TEST(Ensemble, BitIdenticalForAnyThreadCount) {
  const Scenario s = preset_thermal(0.5, 1.0, 0.5, 1.0).with_initial(testutil::random_state());
  const auto ref = qj(s, 300, 1.0, 1e-3, 0.1, 17, 1, true).summary;
  for (unsigned threads : {2u, 3u, 8u}) {
    const auto other = qj(s, 300, 1.0, 1e-3, 0.1, 17, threads, true).summary;
    EXPECT_EQ(ref.mean_c, other.mean_c);
    EXPECT_EQ(ref.stderr_c, other.stderr_c);
    EXPECT_EQ(ref.mean_eof, other.mean_eof);
    for (std::size_t k = 0; k < ref.times.size(); ++k)
      EXPECT_EQ(testutil::frob_diff((*ref.empirical_rho)[k], (*other.empirical_rho)[k]), 0.0);
  }
}

TEST(Ensemble, RecordsMatchSummary) {
  const Scenario s = preset_photon_counting(1.0, 1.0);
  const auto res = qj(s, 130, 1.0, 1e-3, 0.1, 4, 1, false, true);
  ASSERT_EQ(res.records.size(), 130u);
  for (std::size_t k = 0; k < res.records.size(); ++k) EXPECT_EQ(res.records[k].seed, substream_seed(4, k));
  const auto again = average(res.records);
  for (std::size_t k = 0; k < again.times.size(); ++k) EXPECT_NEAR(again.mean_c[k], res.summary.mean_c[k], 1e-15);
  EXPECT_EQ(res.summary.n_traj, 130u);
  EXPECT_THROW(qj(s, 0, 1.0, 1e-3, 0.1, 4), ConfigError);
}

TEST(Ensemble, PhotonCountingMatchesClosedForm) {
  const double g = 1.0;
  const Scenario s = preset_photon_counting(g, g).with_initial(states::bell_phi());
  const auto sum = qj(s, 1500, 3.0 / g, 1e-3 / g, 0.05 / g, 11).summary;
  for (std::size_t k = 0; k < sum.times.size(); ++k)
    EXPECT_LE(std::abs(sum.mean_c[k] - std::exp(-g * sum.times[k])), 3.0 * sum.stderr_c[k] + 1e-12) << "t=" << sum.times[k];
  const auto fit = fit_rate(sum);
  ASSERT_TRUE(fit.fit) << fit.diagnostic;
  EXPECT_NEAR(fit.fit->rate, g, 0.05 * g);
}

TEST(Ensemble, ThermalFigureRate) {
  const Scenario s = preset_thermal(1.0, 2.0, 1.0, 2.0).with_initial(fig1_state());
  const auto fit = fit_rate(qj(s, 1500, 2.0, 1e-3, 0.02, 21).summary);
  ASSERT_TRUE(fit.fit) << fit.diagnostic;
  EXPECT_NEAR(fit.fit->rate, 3.0, 0.15);
}

TEST(Ensemble, MeanStaysAboveMasterConcurrence) {
  const Scenario s = preset_thermal(1.0, 2.0, 1.0, 2.0).with_initial(fig1_state());
  const auto sum = qj(s, 1500, 2.0, 1e-3, 0.05, 23).summary;
  const auto rho = evolve_rho(s, 2.0, 1e-3, 0.05);
  for (std::size_t k = 0; k < sum.times.size(); ++k)
    EXPECT_GE(sum.mean_c[k], concurrence_mixed(rho.states[k]) - 3.0 * sum.stderr_c[k]) << "t=" << sum.times[k];
}

TEST(Ensemble, JensenOnSimulatedEnsemble) {
  const Scenario s = preset_thermal(1.0, 2.0, 1.0, 2.0).with_initial(fig1_state());
  const auto sum = qj(s, 1000, 1.0, 1e-3, 0.05, 24).summary;
  for (std::size_t k = 0; k < sum.times.size(); ++k)
    EXPECT_GE(sum.mean_eof[k], eof_from_concurrence(sum.mean_c[k]) - 3.0 * sum.stderr_eof[k]);
}

TEST(Ensemble, EmpiricalDensityMatchesMasterEquation) {
  const double g = 1.0;
  const Scenario cases[] = {
      preset_photon_counting(g, g).with_initial(states::bell_phi()),
      preset_common_bath(g).with_initial(QubitPairState(0.0, 2.0 / std::sqrt(5.0), 1.0 / std::sqrt(5.0), 0.0)),
  };
  for (const auto& s : cases) {
    const auto sum = qj(s, 5000, 2.0, 1e-3 / g, 0.25, 55, 1, true).summary;
    const auto rho = evolve_rho(s, 2.0, 1e-3 / g, 0.25);
    for (std::size_t k = 0; k < rho.times.size(); ++k)
      EXPECT_LT(testutil::frob_diff((*sum.empirical_rho)[k], rho.states[k].rho), 0.02) << "t=" << rho.times[k];
  }
}

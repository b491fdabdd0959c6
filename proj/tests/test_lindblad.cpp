#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include "test_util.hpp"
#include "trajent/entanglement.hpp"
#include "trajent/lindblad.hpp"
#include "trajent/model.hpp"

using namespace trajent;
using testutil::frob_diff;

namespace {

Mat4 random_density(int rank) {
  Mat4 rho;
  for (int k = 0; k < rank; ++k) {
    const auto s = testutil::random_state();
    rho += cplx(testutil::uniform(0.05, 1.0)) * s.projector();
  }
  return cplx(1.0 / trace(rho).real()) * rho;
}

Mat4 werner(double p) {
  return cplx(p) * states::singlet().projector() + cplx((1.0 - p) / 4.0) * Mat4::identity();
}

// Wootters' concurrence from the general (non-Hermitian) eigenproblem of rho rho~.
double wootters_oracle(const Mat4& rho) {
  const Eigen::Matrix4cd r = testutil::to_eigen(rho);
  const Eigen::Matrix4cd f = testutil::to_eigen(spin_flip());
  const Eigen::Matrix4cd tilde = f * r.conjugate() * f;
  Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(r * tilde);
  std::array<double, 4> l{};
  for (int i = 0; i < 4; ++i) l[i] = std::sqrt(std::max(es.eigenvalues()(i).real(), 0.0));
  std::sort(l.begin(), l.end(), std::greater<>());
  return std::max(0.0, l[0] - l[1] - l[2] - l[3]);
}

Mat2 qubit_thermal(double plus, double minus) {
  Mat2 m;
  m(0, 0) = plus / (plus + minus);
  m(1, 1) = minus / (plus + minus);
  return m;
}

Vector<16> stack(const Mat4& m) {
  Vector<16> v;
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t r = 0; r < 4; ++r) v[c * 4 + r] = m(r, c);
  return v;
}

Mat4 unstack(const Vector<16>& v) {
  Mat4 m;
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t r = 0; r < 4; ++r) m(r, c) = v[c * 4 + r];
  return m;
}

}  // namespace

TEST(Rhs, TraceFreeAndHermitian) {
  const Scenario s = with_laser_phases(preset_thermal(0.3, 1.2, 0.8, 0.5), {0.1, 0.2, 0.3, 0.4});
  for (int i = 0; i < 50; ++i) {
    const Mat4 out = lindblad_rhs(random_density(3), s);
    EXPECT_LT(std::abs(trace(out)), 1e-13);
    EXPECT_LT(hermiticity_defect(out), 1e-13);
  }
}

TEST(Rhs, FixedPoints) {
  Mat4 dd;
  dd(basis::dd, basis::dd) = 1.0;
  EXPECT_LT(max_abs_entry(lindblad_rhs(dd, preset_photon_counting(1.0, 2.0))), 1e-15);
  EXPECT_LT(max_abs_entry(lindblad_rhs(dd, preset_common_bath(1.5))), 1e-15);
  const Mat4 ss = kron2(qubit_thermal(0.4, 1.1), qubit_thermal(0.9, 0.6));
  EXPECT_LT(max_abs_entry(lindblad_rhs(ss, preset_thermal(0.4, 1.1, 0.9, 0.6))), 1e-14);
  // Any diagonal state is fixed under dephasing along z.
  const Mat4 diag = Mat4::diagonal({cplx(0.1), cplx(0.2), cplx(0.3), cplx(0.4)});
  EXPECT_LT(max_abs_entry(lindblad_rhs(diag, preset_dephasing({0, 0, 1}, {0, 0, 1}, 1.0, 2.0))), 1e-15);
}

TEST(Evolve, NoChannelsNoHamiltonianIsConstant) {
  const Scenario s = preset_photon_counting(0.0, 0.0).with_initial(testutil::random_state());
  const auto sol = evolve_rho(s, 2.0, 1e-2, 0.5);
  for (const auto& d : sol.states) EXPECT_LT(frob_diff(d.rho, s.initial().projector()), 1e-14);
}

TEST(Evolve, ThermalRelaxesToProductOfMarginals) {
  const Scenario s = preset_thermal(0.5, 1.0, 0.7, 1.3).with_initial(states::bell_phi(0.4));
  const auto sol = evolve_rho(s, 20.0, 1e-2, 5.0);
  const Mat4 ss = kron2(qubit_thermal(0.5, 1.0), qubit_thermal(0.7, 1.3));
  EXPECT_LT(frob_diff(sol.states.back().rho, ss), 1e-8);
}

TEST(Evolve, OutputsAreDensityMatricesWithBoundedDrift) {
  const Scenario s = with_homodyne_shift(preset_thermal(1.0, 2.0, 1.0, 2.0), std::vector<cplx>(4, cplx(0.5, 0.2)))
                         .with_initial(testutil::random_state());
  const auto sol = evolve_rho(s, 3.0, 1e-3, 0.1);
  EXPECT_EQ(sol.times.size(), sol.states.size());
  EXPECT_LT(sol.max_trace_drift, 1e-12);
  for (const auto& d : sol.states) EXPECT_TRUE(density_violations(d.rho).empty());
}

TEST(Evolve, HalvingStepChangesLittle) {
  const Scenario s = preset_thermal(1.0, 2.0, 0.5, 1.5).with_initial(states::bell_phi(std::numbers::pi / 2));
  const auto a = evolve_rho(s, 1.0, 1e-3, 0.25);
  const auto b = evolve_rho(s, 1.0, 5e-4, 0.25);
  for (std::size_t k = 0; k < a.states.size(); ++k) EXPECT_LE(frob_diff(a.states[k].rho, b.states[k].rho), 1e-8);
}

TEST(Evolve, FourthOrderConvergence) {
  const Scenario s = preset_thermal(1.0, 2.0, 0.5, 1.5).with_initial(states::bell_phi(std::numbers::pi / 2));
  const auto a = evolve_rho(s, 1.0, 2e-2, 1.0);
  const auto b = evolve_rho(s, 1.0, 1e-2, 1.0);
  const auto c = evolve_rho(s, 1.0, 5e-3, 1.0);
  const double ratio = frob_diff(a.states.back().rho, b.states.back().rho) / frob_diff(b.states.back().rho, c.states.back().rho);
  EXPECT_NEAR(ratio, 16.0, 2.0);
}

TEST(Evolve, AgreesWithSuperoperatorExponential) {
  const Scenario scenarios[] = {
      preset_thermal(0.5, 1.0, 0.2, 0.9),
      preset_common_bath(1.0),
      with_laser_phases(preset_dephasing(diagonal_dephasing_axis(), {1, 0, 0}, 0.7, 1.3), {0.5, 1.0}),
  };
  for (const auto& base : scenarios) {
    const Scenario s = base.with_initial(testutil::random_state());
    const auto sol = evolve_rho(s, 2.0, 1e-3, 0.5);
    const Superoperator g = lindblad_generator(s);
    for (std::size_t k = 0; k < sol.times.size(); ++k) {
      const Mat4 exact = unstack(expm(cplx(sol.times[k]) * g) * stack(s.initial().projector()));
      EXPECT_LT(frob_diff(sol.states[k].rho, exact), 1e-10);
    }
  }
}

TEST(Evolve, RejectsBadInput) {
  const Scenario s = preset_photon_counting(1.0, 1.0);
  EXPECT_THROW(evolve_rho(s, 1.0, 0.1, 0.5), ConfigError);
  Mat4 bad = Mat4::identity();
  EXPECT_THROW(evolve_rho(s, 1.0, 1e-2, 0.5, bad), ConfigError);
}

TEST(ConcurrenceMixed, WernerValues) {
  for (double p : {0.0, 1.0 / 3.0, 0.5, 1.0})
    EXPECT_NEAR(concurrence_mixed(werner(p)), std::max(0.0, (3.0 * p - 1.0) / 2.0), 1e-10) << "p=" << p;
  for (int i = 0; i <= 20; ++i) {
    const double p = i / 20.0;
    EXPECT_NEAR(concurrence_mixed(werner(p)), wootters_oracle(werner(p)), 1e-9);
  }
}

TEST(ConcurrenceMixed, PureStateReduction) {
  for (int i = 0; i < 100; ++i) {
    const auto s = testutil::random_state();
    EXPECT_NEAR(concurrence_mixed(s.projector()), concurrence_pure(s), 1e-9);
  }
}

TEST(ConcurrenceMixed, MaximallyMixedAndProducts) {
  EXPECT_NEAR(concurrence_mixed(cplx(0.25) * Mat4::identity()), 0.0, 1e-15);
  for (int i = 0; i < 20; ++i) {
    const Mat4 a = kron2(qubit_thermal(testutil::uniform(0.1, 1.0), 1.0), qubit_thermal(1.0, testutil::uniform(0.1, 1.0)));
    EXPECT_NEAR(concurrence_mixed(a), 0.0, 1e-12);
  }
}

TEST(ConcurrenceMixed, AgreesWithNonHermitianOracle) {
  for (int rank : {2, 3, 4})
    for (int i = 0; i < 100; ++i) {
      const Mat4 rho = random_density(rank);
      const double c = concurrence_mixed(rho);
      EXPECT_GE(c, 0.0);
      EXPECT_LE(c, 1.0);
      EXPECT_NEAR(c, wootters_oracle(rho), 1e-7);
    }
}

TEST(ConcurrenceMixed, InvariantUnderLocalUnitaries) {
  for (int i = 0; i < 50; ++i) {
    const Mat4 rho = random_density(2);
    const Mat4 u = kron2(expm(cplx(0.0, -1.0) * testutil::random_hermitian<2>()),
                         expm(cplx(0.0, -1.0) * testutil::random_hermitian<2>()));
    EXPECT_NEAR(concurrence_mixed(u * rho * adjoint(u)), concurrence_mixed(rho), 1e-9);
  }
}

TEST(ConcurrenceMixed, RejectsInvalidInput) {
  EXPECT_THROW(concurrence_mixed(Mat4::identity()), ConfigError);
  Mat4 neg = Mat4::diagonal({cplx(0.6), cplx(0.6), cplx(-0.2), cplx(0.0)});
  EXPECT_THROW(concurrence_mixed(neg), ConfigError);
  Mat4 nonherm = cplx(0.25) * Mat4::identity();
  nonherm(0, 1) = 0.1;
  EXPECT_THROW(concurrence_mixed(nonherm), ConfigError);
}

TEST(SuddenDeath, ThermalScenario) {
  const Scenario s = preset_thermal(1.0, 2.0, 1.0, 2.0)
                         .with_initial(QubitPairState(cplx(1.0 / std::sqrt(2.0)), 0, 0, cplx(0.0, -1.0 / std::sqrt(2.0))));
  const auto sol = evolve_rho(s, 3.0, 1e-3, 0.01);
  std::size_t death = sol.times.size();
  for (std::size_t k = 0; k < sol.times.size(); ++k)
    if (concurrence_mixed(sol.states[k]) == 0.0) {
      death = k;
      break;
    }
  ASSERT_LT(death, sol.times.size());
  EXPECT_GT(sol.times[death], 0.0);
  for (std::size_t k = death; k < sol.times.size(); ++k) EXPECT_EQ(concurrence_mixed(sol.states[k]), 0.0);
}

TEST(SuddenDeath, DephasingDependsOnInitialPhase) {
  const Scenario base = preset_dephasing(diagonal_dephasing_axis(), diagonal_dephasing_axis(), 1.0, 1.0);
  const auto with_phase = [&](double phi) { return evolve_rho(base.with_initial(states::bell_phi(phi)), 5.0, 1e-3, 0.05); };
  const auto dies = with_phase(0.0);
  EXPECT_EQ(concurrence_mixed(dies.states.back()), 0.0);
  const auto lives = with_phase(std::numbers::pi / 2);
  for (const auto& d : lives.states) EXPECT_GT(concurrence_mixed(d), 0.0);
}

TEST(CommonBath, SingleExcitationClosedForm) {
  const double g = 0.8;
  for (int i = 0; i < 10; ++i) {
    const auto init = QubitPairState::normalized(0.0, testutil::random_complex(), testutil::random_complex(), 0.0);
    const Scenario s = preset_common_bath(g).with_initial(init);
    const auto sol = evolve_rho(s, 4.0, 1e-3, 0.1);
    const cplx plus0 = (init.c_ud() + init.c_du()) / std::sqrt(2.0);
    const cplx minus0 = (init.c_ud() - init.c_du()) / std::sqrt(2.0);
    for (std::size_t k = 0; k < sol.times.size(); ++k) {
      const cplx plus = plus0 * std::exp(-g * sol.times[k]);
      const cplx ud = (plus + minus0) / std::sqrt(2.0), du = (plus - minus0) / std::sqrt(2.0);
      EXPECT_NEAR(concurrence_mixed(sol.states[k]), 2.0 * std::abs(ud * std::conj(du)), 1e-8);
    }
  }
}

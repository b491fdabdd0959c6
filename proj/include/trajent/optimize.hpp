// optimize.hpp - numerical search for the jump unraveling of the thermal
// master equation that best preserves the averaged concurrence.
//
// Each qubit's two outcomes are mixed by a 2x2 unitary
//   U = e^{i phi} [[ e^{i a} cos t,  e^{i b} sin t],
//                  [-e^{-i b} sin t, e^{-i a} cos t]]
// and kappa_qj of the resulting rotated scenario is minimized with a
// Nelder-Mead simplex from several random starts. The two qubits decouple, so
// each is optimized on its own.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <gsl/gsl_errno.h>
#include <gsl/gsl_multimin.h>
#include <gsl/gsl_vector.h>

#include "trajent/analytics.hpp"
#include "trajent/errors.hpp"
#include "trajent/model.hpp"

namespace trajent {

struct UnitaryAngles {
  double mix = 0.0;     // t
  double phase_a = 0.0; // a
  double phase_b = 0.0; // b
  double global = 0.0;  // phi
};

inline MixingMatrix mixing_from_angles(const UnitaryAngles& g) {
  const cplx eg = std::exp(kI * g.global);
  const double c = std::cos(g.mix);
  const double s = std::sin(g.mix);
  return {{eg * std::exp(kI * g.phase_a) * c, eg * std::exp(kI * g.phase_b) * s},
          {-eg * std::exp(-kI * g.phase_b) * s, eg * std::exp(-kI * g.phase_a) * c}};
}

// kappa_qj contribution of one qubit whose sigma_+ / sigma_- channels are mixed by u.
inline double rotated_qubit_kappa(const MixingMatrix& u, double plus, double minus) {
  double k = 0.0;
  for (const auto& row : u) {
    // sqrt(gamma_mu) J_mu; the rate formula is homogeneous in gamma |J|^2.
    const Mat2 j = (std::sqrt(plus) * row[0]) * pauli::raise() + (std::sqrt(minus) * row[1]) * pauli::lower();
    k += kappa_qj_channel(1.0, j);
  }
  return k;
}

struct QubitScheme {
  UnitaryAngles angles;
  MixingMatrix mixing;
  double rate = 0.0;
};

struct OptimizedUnraveling {
  QubitScheme qubit_a;
  QubitScheme qubit_b;
  double achieved = 0.0;   // kappa_qj of the best scheme found
  double reference = 0.0;  // closed-form optimum
};

namespace detail {

struct QubitObjective {
  double plus;
  double minus;
};

inline double nm_objective(const gsl_vector* x, void* params) {
  const auto* p = static_cast<const QubitObjective*>(params);
  const UnitaryAngles g{gsl_vector_get(x, 0), gsl_vector_get(x, 1), gsl_vector_get(x, 2), gsl_vector_get(x, 3)};
  return rotated_qubit_kappa(mixing_from_angles(g), p->plus, p->minus);
}

inline QubitScheme optimize_qubit(double plus, double minus, int restarts, std::mt19937_64& rng) {
  QubitObjective params{plus, minus};

  // Identity mixing is kept unless a search finds something strictly better.
  QubitScheme best;
  best.mixing = mixing_from_angles(best.angles);
  best.rate = rotated_qubit_kappa(best.mixing, plus, minus);

  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  gsl_multimin_function fn{&nm_objective, 4, &params};
  gsl_multimin_fminimizer* mini = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, 4);
  gsl_vector* x = gsl_vector_alloc(4);
  gsl_vector* step = gsl_vector_alloc(4);

  for (int r = 0; r < restarts; ++r) {
    for (std::size_t i = 0; i < 4; ++i) gsl_vector_set(x, i, angle(rng));
    gsl_vector_set_all(step, 0.3);
    gsl_multimin_fminimizer_set(mini, &fn, x, step);
    int status = GSL_CONTINUE;
    for (int it = 0; it < 2000 && status == GSL_CONTINUE; ++it) {
      if (gsl_multimin_fminimizer_iterate(mini) != 0) break;
      status = gsl_multimin_test_size(gsl_multimin_fminimizer_size(mini), 1e-10);
    }
    const double val = mini->fval;
    if (val < best.rate - 1e-12) {
      const gsl_vector* xm = gsl_multimin_fminimizer_x(mini);
      best.angles = {gsl_vector_get(xm, 0), gsl_vector_get(xm, 1), gsl_vector_get(xm, 2), gsl_vector_get(xm, 3)};
      best.mixing = mixing_from_angles(best.angles);
      best.rate = val;
    }
  }
  gsl_vector_free(step);
  gsl_vector_free(x);
  gsl_multimin_fminimizer_free(mini);
  return best;
}

}  // namespace detail

inline OptimizedUnraveling optimize_unraveling(const ThermalRates& rates, int restarts = 32, std::uint64_t seed = 7) {
  for (double x : {rates.plus_a, rates.minus_a, rates.plus_b, rates.minus_b})
    if (!(x >= 0.0) || !std::isfinite(x)) throw ConfigError("optimize_unraveling: rates must be finite and >= 0");
  if (restarts < 1) throw ConfigError("optimize_unraveling: restarts must be >= 1");
  std::mt19937_64 rng(seed);
  OptimizedUnraveling out;
  out.qubit_a = detail::optimize_qubit(rates.plus_a, rates.minus_a, restarts, rng);
  out.qubit_b = detail::optimize_qubit(rates.plus_b, rates.minus_b, restarts, rng);
  out.achieved = out.qubit_a.rate + out.qubit_b.rate;
  out.reference = kappa_opt_thermal(rates);
  return out;
}

}  // namespace trajent

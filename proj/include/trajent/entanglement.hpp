// entanglement.hpp - pure-state concurrence and entanglement of formation.

#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "trajent/errors.hpp"
#include "trajent/linalg.hpp"
#include "trajent/state.hpp"

namespace trajent {

inline constexpr double kConcurrenceNormTol = 1e-6;

struct Preconcurrence {
  cplx value;
};

// <psi| sigma_y(x)sigma_y T |psi> for an arbitrary (not necessarily unit)
// vector. For unnormalized v this is ||v||^2 times the pre-concurrence of
// v / ||v||.
inline cplx preconcurrence_raw(const Vec4& v) {
  using namespace basis;
  return 2.0 * (std::conj(v[ud]) * std::conj(v[du]) - std::conj(v[uu]) * std::conj(v[dd]));
}

inline Preconcurrence preconcurrence(const Vec4& v) {
  const double n2 = squared_norm(v);
  if (std::abs(n2 - 1.0) > kConcurrenceNormTol)
    throw ConfigError("preconcurrence: state is not normalized");
  return {preconcurrence_raw(v)};
}

inline Preconcurrence preconcurrence(const QubitPairState& s) { return {preconcurrence_raw(s.vec())}; }

inline double concurrence_pure(const Vec4& v) { return std::abs(preconcurrence(v).value); }
inline double concurrence_pure(const QubitPairState& s) { return std::abs(preconcurrence_raw(s.vec())); }

// Concurrence of v / ||v|| with no normalization precondition.
inline double concurrence_of_direction(const Vec4& v) {
  const double n2 = squared_norm(v);
  if (!(n2 > 0.0)) return 0.0;
  return std::abs(preconcurrence_raw(v)) / n2;
}

// Natural-log binary entropy.
inline double binary_entropy(double x) {
  auto term = [](double p) { return p > 0.0 ? -p * std::log(p) : 0.0; };
  return term(x) + term(1.0 - x);
}

// E = h((1 + sqrt(1 - C^2)) / 2), mapping [0, 1] onto [0, ln 2].
inline double eof_from_concurrence(double c) {
  if (!(c >= 0.0 && c <= 1.0)) {
    // Monte Carlo round-off can land a hair above one.
    if (c > 1.0 && c <= 1.0 + 1e-9) {
      c = 1.0;
    } else {
      throw ConfigError("eof_from_concurrence: concurrence outside [0, 1]");
    }
  }
  return binary_entropy(0.5 * (1.0 + std::sqrt(std::max(0.0, 1.0 - c * c))));
}

}  // namespace trajent

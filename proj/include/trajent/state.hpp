#pragma once

#include <cmath>
#include <string>

#include "trajent/errors.hpp"
#include "trajent/linalg.hpp"

namespace trajent {

// Indices into a two-qubit amplitude vector.
namespace basis {
inline constexpr std::size_t uu = 0;
inline constexpr std::size_t ud = 1;
inline constexpr std::size_t du = 2;
inline constexpr std::size_t dd = 3;
}  // namespace basis

inline constexpr double kStateNormTol = 1e-9;

// Unit vector in C^2 (x) C^2 with amplitudes c_ss' on {uu, ud, du, dd}.
class QubitPairState {
 public:
  QubitPairState() : amp_{{1.0, 0.0, 0.0, 0.0}} {}

  explicit QubitPairState(const Vec4& amplitudes) : amp_(amplitudes) {
    if (!all_finite(amp_)) throw ConfigError("QubitPairState: non-finite amplitude");
    const double n2 = squared_norm(amp_);
    if (std::abs(n2 - 1.0) > kStateNormTol)
      throw ConfigError("QubitPairState: amplitudes not normalized (|psi|^2 = " + std::to_string(n2) + ")");
  }

  QubitPairState(cplx c_uu, cplx c_ud, cplx c_du, cplx c_dd) : QubitPairState(Vec4{{c_uu, c_ud, c_du, c_dd}}) {}

  static QubitPairState normalized(const Vec4& v) {
    const double n = norm(v);
    if (!(n > 0.0) || !std::isfinite(n)) throw ConfigError("QubitPairState: cannot normalize a zero vector");
    return QubitPairState(v * cplx(1.0 / n));
  }

  static QubitPairState normalized(cplx c_uu, cplx c_ud, cplx c_du, cplx c_dd) {
    return normalized(Vec4{{c_uu, c_ud, c_du, c_dd}});
  }

  const Vec4& vec() const { return amp_; }
  cplx c_uu() const { return amp_[basis::uu]; }
  cplx c_ud() const { return amp_[basis::ud]; }
  cplx c_du() const { return amp_[basis::du]; }
  cplx c_dd() const { return amp_[basis::dd]; }

  Mat4 projector() const { return outer(amp_, amp_); }

 private:
  Vec4 amp_;
};

namespace states {

// (|uu> + e^{-i phi} |dd>) / sqrt 2
inline QubitPairState bell_phi(double phi = 0.0) {
  const double h = 1.0 / std::sqrt(2.0);
  return QubitPairState(h, 0.0, 0.0, h * std::exp(-kI * phi));
}

// (|ud> - |du>) / sqrt 2
inline QubitPairState singlet() {
  const double h = 1.0 / std::sqrt(2.0);
  return QubitPairState(0.0, h, -h, 0.0);
}

}  // namespace states

}  // namespace trajent

// analytics.hpp - closed-form disentanglement rates and mean-concurrence curves.
//
// For qubits monitored locally, the trajectory-averaged concurrence decays as
// C0 exp(-kappa t) with kappa fixed by the measurement scheme. With
// tr K = tr_{C^4} K and the sums running over local channels (gamma, J):
//
//   photon counting / general jumps   kappa_qj     = tr K / 2 - sum gamma |det J|
//   homodyne diffusion                kappa_ho     = tr K / 2 - sum gamma (Re det J + (Im tr J)^2 / 2)
//   homodyne, best laser phases       kappa_ho_opt = tr K / 2 - sum gamma (|det J - (tr J)^2 / 4| + |tr J|^2 / 4)
//   heterodyne diffusion              kappa_het    = tr K / 2 - sum gamma |tr J|^2 / 4
//
// Jump rates use the operator actually detected (J plus any laser shift);
// the diffusive rates use the unshifted J.

#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "trajent/entanglement.hpp"
#include "trajent/errors.hpp"
#include "trajent/linalg.hpp"
#include "trajent/model.hpp"
#include "trajent/state.hpp"

namespace trajent {

namespace detail {

inline void require_local(const Scenario& s, const char* what) {
  for (const auto& c : s.channels())
    if (!c.is_local())
      throw ConfigError(std::string(what) + ": channel '" + c.id +
                        "' is non-local (joint); the rate formulas hold only for local channels");
}

// gamma * tr(J^dagger J) / 2: the channel's share of tr_{C^4}(K) / 2.
inline double half_trace_share(double rate, const Mat2& j) { return 0.5 * rate * trace(adjoint(j) * j).real(); }

}  // namespace detail

inline double kappa_qj_channel(double rate, const Mat2& j) {
  return detail::half_trace_share(rate, j) - rate * std::abs(det2(j));
}

inline double kappa_ho_channel(double rate, const Mat2& j) {
  const double im_tr = trace(j).imag();
  return detail::half_trace_share(rate, j) - rate * (det2(j).real() + 0.5 * im_tr * im_tr);
}

inline double kappa_ho_opt_channel(double rate, const Mat2& j) {
  const cplx tr = trace(j);
  return detail::half_trace_share(rate, j) - rate * (std::abs(det2(j) - 0.25 * tr * tr) + 0.25 * std::norm(tr));
}

inline double kappa_het_channel(double rate, const Mat2& j) {
  return detail::half_trace_share(rate, j) - 0.25 * rate * std::norm(trace(j));
}

// Jump-unraveling rate on the detected operators at time t.
inline double kappa_qj(const Scenario& s, double t = 0.0) {
  detail::require_local(s, "kappa_qj");
  double k = 0.0;
  for (const auto& c : s.channels()) k += kappa_qj_channel(c.rate, c.local_effective(t));
  return k;
}

// Sum of squares form with J~ = e^{-i theta} J, 2 theta = arg det J (theta = 0
// when det J = 0):
//   sum gamma/2 (|<u|J~|u> - <d|J~^dagger|d>|^2 + |<u|J~ + J~^dagger|d>|^2).
inline double kappa_qj_decomposed(const Scenario& s, double t = 0.0) {
  detail::require_local(s, "kappa_qj_decomposed");
  double k = 0.0;
  for (const auto& c : s.channels()) {
    const Mat2 j = c.local_effective(t);
    const cplx d = det2(j);
    const double theta = std::abs(d) > 0.0 ? 0.5 * std::arg(d) : 0.0;
    const Mat2 jt = std::exp(-kI * theta) * j;
    const Mat2 jd = adjoint(jt);
    const cplx diag = jt(0, 0) - jd(1, 1);
    const cplx off = jt(0, 1) + jd(0, 1);
    k += 0.5 * c.rate * (std::norm(diag) + std::norm(off));
  }
  return k;
}

inline double kappa_ho(const Scenario& s) {
  detail::require_local(s, "kappa_ho");
  double k = 0.0;
  for (const auto& c : s.channels()) k += kappa_ho_channel(c.rate, c.local_op());
  return k;
}

inline double kappa_ho_opt(const Scenario& s) {
  detail::require_local(s, "kappa_ho_opt");
  double k = 0.0;
  for (const auto& c : s.channels()) k += kappa_ho_opt_channel(c.rate, c.local_op());
  return k;
}

inline double kappa_het(const Scenario& s) {
  detail::require_local(s, "kappa_het");
  double k = 0.0;
  for (const auto& c : s.channels()) k += kappa_het_channel(c.rate, c.local_op());
  return k;
}

// Best jump unraveling of the thermal master equation:
// 1/2 sum_i (sqrt(gamma_-^i) - sqrt(gamma_+^i))^2.
inline double kappa_opt_thermal(const ThermalRates& r) {
  for (double x : {r.plus_a, r.minus_a, r.plus_b, r.minus_b})
    if (!(x >= 0.0)) throw ConfigError("kappa_opt_thermal: rates must be >= 0");
  auto sq = [](double a, double b) {
    const double d = std::sqrt(a) - std::sqrt(b);
    return d * d;
  };
  return 0.5 * (sq(r.minus_a, r.plus_a) + sq(r.minus_b, r.plus_b));
}

struct ChannelRates {
  std::string id;
  double qj = 0.0;
  double ho = 0.0;
  double ho_opt = 0.0;
  double het = 0.0;
};

struct RateReport {
  double kappa_qj = 0.0;
  std::optional<double> kappa_qj_opt_thermal;
  double kappa_ho = 0.0;
  double kappa_ho_opt = 0.0;
  double kappa_het = 0.0;
  std::vector<ChannelRates> per_channel;
};

inline RateReport rate_report(const Scenario& s) {
  detail::require_local(s, "rate_report");
  RateReport r;
  for (const auto& c : s.channels()) {
    ChannelRates cr;
    cr.id = c.id;
    cr.qj = kappa_qj_channel(c.rate, c.local_effective(0.0));
    cr.ho = kappa_ho_channel(c.rate, c.local_op());
    cr.ho_opt = kappa_ho_opt_channel(c.rate, c.local_op());
    cr.het = kappa_het_channel(c.rate, c.local_op());
    r.kappa_qj += cr.qj;
    r.kappa_ho += cr.ho;
    r.kappa_ho_opt += cr.ho_opt;
    r.kappa_het += cr.het;
    r.per_channel.push_back(std::move(cr));
  }
  if (s.thermal_rates()) r.kappa_qj_opt_thermal = kappa_opt_thermal(*s.thermal_rates());
  return r;
}

inline double mean_concurrence_independent(double c0, double kappa, double t) {
  if (!(c0 >= 0.0 && c0 <= 1.0 + 1e-12)) throw ConfigError("mean_concurrence_independent: C0 outside [0, 1]");
  if (!(kappa >= 0.0)) throw ConfigError("mean_concurrence_independent: kappa must be >= 0");
  return c0 * std::exp(-kappa * t);
}

// ------------------------------ common bath -----------------------------------

struct CommonBathCurve {
  cplx c_plus;
  cplx c_minus;
  cplx c_uu;
  cplx c_dd;
  double gamma = 0.0;

  static CommonBathCurve from_state(const QubitPairState& s, double gamma) {
    if (!(gamma >= 0.0)) throw ConfigError("CommonBathCurve: gamma must be >= 0");
    return {s.c_ud() + s.c_du(), s.c_ud() - s.c_du(), s.c_uu(), s.c_dd(), gamma};
  }
};

// 1/2 |c-^2 - c+^2 e^{-2 g t} + 4 c_uu c_dd e^{-g t}| + 2 |c_uu|^2 g t e^{-2 g t}
inline double common_bath_mean(const CommonBathCurve& c, double t) {
  if (!(t >= 0.0)) throw ConfigError("common_bath_mean: t must be >= 0");
  const double e1 = std::exp(-c.gamma * t);
  const double e2 = e1 * e1;
  const cplx inner_term = c.c_minus * c.c_minus - c.c_plus * c.c_plus * e2 + 4.0 * c.c_uu * c.c_dd * e1;
  return 0.5 * std::abs(inner_term) + 2.0 * std::norm(c.c_uu) * c.gamma * t * e2;
}

// The averaged concurrence touches zero at a finite time only for c_uu = 0
// with c+/c- real and |c+/c-| > 1; the zero is at ln|c+/c-| / gamma.
inline std::optional<double> common_bath_vanish_time(const CommonBathCurve& c, double tol = 1e-12) {
  if (std::abs(c.c_uu) > tol || std::abs(c.c_minus) <= tol || !(c.gamma > 0.0)) return std::nullopt;
  const cplx ratio = c.c_plus / c.c_minus;
  if (std::abs(ratio.imag()) > tol * std::max(1.0, std::abs(ratio))) return std::nullopt;
  const double m = std::abs(ratio.real());
  if (!(m > 1.0)) return std::nullopt;
  return std::log(m) / c.gamma;
}

// Amplitudes of e^{-tK} psi for K = gamma J^dagger J / 2, J = sigma_- (x) 1 + 1 (x) sigma_-.
inline Vec4 common_bath_no_jump_amplitudes(const QubitPairState& init, double gamma, double t) {
  const double e = std::exp(-gamma * t);
  Vec4 v;
  v[basis::uu] = e * init.c_uu();
  v[basis::ud] = 0.5 * ((e + 1.0) * init.c_ud() + (e - 1.0) * init.c_du());
  v[basis::du] = 0.5 * ((e + 1.0) * init.c_du() + (e - 1.0) * init.c_ud());
  v[basis::dd] = init.c_dd();
  return v;
}

struct CommonBathPieces {
  double no_jump = 0.0;   // p_nj(0,t) C_nj(t)
  double one_jump = 0.0;  // integral over the single jump time
};

inline CommonBathPieces common_bath_one_jump_pieces(const QubitPairState& init, double gamma, double t) {
  if (!(t >= 0.0)) throw ConfigError("common_bath_one_jump_pieces: t must be >= 0");
  CommonBathPieces p;
  p.no_jump = std::abs(preconcurrence_raw(common_bath_no_jump_amplitudes(init, gamma, t)));
  p.one_jump = 2.0 * std::norm(init.c_uu()) * gamma * t * std::exp(-2.0 * gamma * t);
  return p;
}

}  // namespace trajent

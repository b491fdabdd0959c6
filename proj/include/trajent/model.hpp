// model.hpp - jump channels, scenarios and the preset catalog.
//
// A scenario is a qubit-pair Hamiltonian plus a list of monitored jump
// channels. Local channels keep their 2x2 operator (the rate formulas need
// det and trace on C^2); engines work with the 4x4 lifts.

#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "trajent/errors.hpp"
#include "trajent/linalg.hpp"
#include "trajent/state.hpp"

namespace trajent {

enum class Locality { QubitA, QubitB, Joint };

inline const char* to_string(Locality l) {
  switch (l) {
    case Locality::QubitA: return "qubit-A";
    case Locality::QubitB: return "qubit-B";
    case Locality::Joint: return "joint";
  }
  return "?";
}

struct JumpChannel {
  std::string id;
  Locality locality = Locality::QubitA;
  std::variant<Mat2, Mat4> op;
  double rate = 0.0;
  std::optional<cplx> shift;        // homodyne / heterodyne amplitude alpha
  std::optional<double> het_freq;   // heterodyne Omega; shift is alpha e^{i Omega t}

  bool is_local() const { return locality != Locality::Joint; }
  bool time_dependent() const { return het_freq.has_value(); }

  const Mat2& local_op() const {
    if (const auto* m = std::get_if<Mat2>(&op)) return *m;
    throw ConfigError("channel '" + id + "' is not a local 2x2 channel");
  }

  cplx shift_at(double t) const {
    if (!shift) return 0.0;
    if (het_freq) return *shift * std::exp(kI * (*het_freq * t));
    return *shift;
  }

  // 2x2 operator including the laser shift, evaluated at time t.
  Mat2 local_effective(double t = 0.0) const {
    return local_op() + shift_at(t) * Mat2::identity();
  }

  Mat4 lifted_base() const {
    if (const auto* m4 = std::get_if<Mat4>(&op)) return *m4;
    const Mat2& m2 = std::get<Mat2>(op);
    return locality == Locality::QubitA ? lift_a(m2) : lift_b(m2);
  }

  Mat4 lifted(double t = 0.0) const { return lifted_base() + shift_at(t) * Mat4::identity(); }
};

inline JumpChannel local_channel(std::string id, Locality where, const Mat2& op, double rate) {
  if (where == Locality::Joint) throw ConfigError("local_channel: locality must be qubit-A or qubit-B");
  return JumpChannel{std::move(id), where, op, rate, std::nullopt, std::nullopt};
}

inline JumpChannel joint_channel(std::string id, const Mat4& op, double rate) {
  return JumpChannel{std::move(id), Locality::Joint, op, rate, std::nullopt, std::nullopt};
}

// Rates of the two-channel (sigma_+, sigma_-) thermal model per qubit.
struct ThermalRates {
  double plus_a = 0.0;
  double minus_a = 0.0;
  double plus_b = 0.0;
  double minus_b = 0.0;
};

inline Mat4 local_hamiltonian(const Mat2& h_a, const Mat2& h_b) { return lift_a(h_a) + lift_b(h_b); }

class Scenario {
 public:
  Scenario() : Scenario(Mat4{}, {}) {}

  Scenario(Mat4 h0, std::vector<JumpChannel> channels, QubitPairState initial = states::bell_phi())
      : h0_(h0), channels_(std::move(channels)), initial_(initial) {
    for (const auto& c : channels_) {
      const bool is_mat2 = std::holds_alternative<Mat2>(c.op);
      if (is_mat2 == (c.locality == Locality::Joint))
        throw ConfigError("channel '" + c.id + "': operator shape does not match its locality");
    }
    damping_ = damping_at(0.0);
    heff_ = h0_ - kI * damping_;
  }

  const Mat4& h0() const { return h0_; }
  const std::vector<JumpChannel>& channels() const { return channels_; }
  const QubitPairState& initial() const { return initial_; }

  // K = 1/2 sum gamma J^dagger J with shifts included.
  const Mat4& damping() const { return damping_; }
  // H_eff = H0 - i K.
  const Mat4& effective_hamiltonian() const { return heff_; }

  Mat4 damping_at(double t) const {
    Mat4 k;
    for (const auto& c : channels_) {
      const Mat4 j = c.lifted(t);
      k += (0.5 * c.rate) * (adjoint(j) * j);
    }
    return k;
  }

  // K built from the unshifted operators, as used by the diffusive limits.
  Mat4 damping_base() const {
    Mat4 k;
    for (const auto& c : channels_) {
      const Mat4 j = c.lifted_base();
      k += (0.5 * c.rate) * (adjoint(j) * j);
    }
    return k;
  }

  bool all_local() const {
    for (const auto& c : channels_)
      if (!c.is_local()) return false;
    return true;
  }

  bool time_dependent() const {
    for (const auto& c : channels_)
      if (c.time_dependent()) return true;
    return false;
  }

  bool has_shifts() const {
    for (const auto& c : channels_)
      if (c.shift) return true;
    return false;
  }

  double max_rate() const {
    double g = 0.0;
    for (const auto& c : channels_) g = std::max(g, c.rate);
    return g;
  }

  Scenario with_initial(const QubitPairState& s) const {
    Scenario out = *this;
    out.initial_ = s;
    return out;
  }

  Scenario with_channels(std::vector<JumpChannel> channels) const {
    Scenario out(h0_, std::move(channels), initial_);
    out.thermal_ = thermal_;
    out.label = label;
    return out;
  }

  const std::optional<ThermalRates>& thermal_rates() const { return thermal_; }
  Scenario& set_thermal_rates(const ThermalRates& r) {
    thermal_ = r;
    return *this;
  }

  std::string label;

 private:
  Mat4 h0_;
  std::vector<JumpChannel> channels_;
  QubitPairState initial_;
  Mat4 damping_;
  Mat4 heff_;
  std::optional<ThermalRates> thermal_;
};

// ------------------------------- presets --------------------------------------

namespace detail {

inline void require_rate(double r, const char* what) {
  if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError(std::string(what) + ": rates must be finite and >= 0");
}

inline std::string qubit_suffix(Locality l) { return l == Locality::QubitA ? "A" : "B"; }

}  // namespace detail

// Zero-temperature photon counting: sigma_- on each qubit.
inline Scenario preset_photon_counting(double gamma_a, double gamma_b) {
  detail::require_rate(gamma_a, "preset_photon_counting");
  detail::require_rate(gamma_b, "preset_photon_counting");
  Scenario s(Mat4{}, {local_channel("minus_A", Locality::QubitA, pauli::lower(), gamma_a),
                      local_channel("minus_B", Locality::QubitB, pauli::lower(), gamma_b)});
  s.label = "photon_counting";
  s.set_thermal_rates({0.0, gamma_a, 0.0, gamma_b});
  return s;
}

// Positive temperature: sigma_- (rate gamma_minus) and sigma_+ (rate gamma_plus) per qubit.
inline Scenario preset_thermal(double plus_a, double minus_a, double plus_b, double minus_b) {
  for (double r : {plus_a, minus_a, plus_b, minus_b}) detail::require_rate(r, "preset_thermal");
  Scenario s(Mat4{}, {local_channel("minus_A", Locality::QubitA, pauli::lower(), minus_a),
                      local_channel("plus_A", Locality::QubitA, pauli::raise(), plus_a),
                      local_channel("minus_B", Locality::QubitB, pauli::lower(), minus_b),
                      local_channel("plus_B", Locality::QubitB, pauli::raise(), plus_b)});
  s.label = "thermal";
  s.set_thermal_rates({plus_a, minus_a, plus_b, minus_b});
  return s;
}

inline Scenario preset_thermal(const ThermalRates& r) { return preset_thermal(r.plus_a, r.minus_a, r.plus_b, r.minus_b); }

// Pure dephasing: Hermitian traceless v.sigma on each qubit.
inline Scenario preset_dephasing(const std::array<double, 3>& v_a, const std::array<double, 3>& v_b, double gamma_a,
                                 double gamma_b) {
  detail::require_rate(gamma_a, "preset_dephasing");
  detail::require_rate(gamma_b, "preset_dephasing");
  for (const auto& v : {v_a, v_b}) {
    const double n = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (!(std::abs(n - 1.0) <= 1e-12)) throw ConfigError("preset_dephasing: direction vector must be unit");
  }
  Scenario s(Mat4{}, {local_channel("dephase_A", Locality::QubitA, pauli::along(v_a), gamma_a),
                      local_channel("dephase_B", Locality::QubitB, pauli::along(v_b), gamma_b)});
  s.label = "dephasing";
  return s;
}

// Direction of e^{i pi/4} sigma_- + e^{-i pi/4} sigma_+.
inline std::array<double, 3> diagonal_dephasing_axis() {
  const double h = 1.0 / std::sqrt(2.0);
  return {h, h, 0.0};
}

// Rows are outcomes mu, columns are (sigma_+, sigma_-). Columns must be
// orthonormal.
using MixingMatrix = std::vector<std::array<cplx, 2>>;

inline MixingMatrix identity_mixing() { return {{cplx(1.0), cplx(0.0)}, {cplx(0.0), cplx(1.0)}}; }

// u_{1,+-} = 1/sqrt2, u_{2,+-} = +-1/sqrt2.
inline MixingMatrix balanced_mixing() {
  const double h = 1.0 / std::sqrt(2.0);
  return {{cplx(h), cplx(h)}, {cplx(h), cplx(-h)}};
}

inline double isometry_defect(const MixingMatrix& u) {
  double worst = 0.0;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t b = 0; b < 2; ++b) {
      cplx g{};
      for (const auto& row : u) g += std::conj(row[a]) * row[b];
      worst = std::max(worst, std::abs(g - (a == b ? 1.0 : 0.0)));
    }
  return worst;
}

namespace detail {

// J_mu = sum_m sqrt(gamma_m / gamma_mu) u_{mu m} sigma_m with rate gamma_mu.
// When no explicit gamma_mu is given it defaults to sum_m gamma_m |u_{mu m}|^2;
// only sqrt(gamma_mu) J_mu enters the generator.
inline std::vector<JumpChannel> rotated_channels(Locality where, const MixingMatrix& u, double plus, double minus,
                                                 const std::vector<double>& outcome_rates) {
  if (isometry_defect(u) > 1e-10) throw ConfigError("preset_rotated_thermal: mixing matrix columns are not orthonormal");
  if (!outcome_rates.empty() && outcome_rates.size() != u.size())
    throw ConfigError("preset_rotated_thermal: one outcome rate per mixing row required");
  std::vector<JumpChannel> out;
  for (std::size_t mu = 0; mu < u.size(); ++mu) {
    const auto& row = u[mu];
    double g_mu = outcome_rates.empty() ? plus * std::norm(row[0]) + minus * std::norm(row[1]) : outcome_rates[mu];
    require_rate(g_mu, "preset_rotated_thermal");
    if (g_mu == 0.0) continue;
    const Mat2 j = (std::sqrt(plus / g_mu) * row[0]) * pauli::raise() + (std::sqrt(minus / g_mu) * row[1]) * pauli::lower();
    out.push_back(local_channel("rot" + std::to_string(mu + 1) + "_" + qubit_suffix(where), where, j, g_mu));
  }
  return out;
}

}  // namespace detail

inline Scenario preset_rotated_thermal(const MixingMatrix& u_a, const MixingMatrix& u_b, const ThermalRates& r,
                                       const std::vector<double>& outcome_rates_a = {},
                                       const std::vector<double>& outcome_rates_b = {}) {
  for (double x : {r.plus_a, r.minus_a, r.plus_b, r.minus_b}) detail::require_rate(x, "preset_rotated_thermal");
  auto channels = detail::rotated_channels(Locality::QubitA, u_a, r.plus_a, r.minus_a, outcome_rates_a);
  auto more = detail::rotated_channels(Locality::QubitB, u_b, r.plus_b, r.minus_b, outcome_rates_b);
  channels.insert(channels.end(), more.begin(), more.end());
  Scenario s(Mat4{}, std::move(channels));
  s.label = "rotated_thermal";
  s.set_thermal_rates(r);
  return s;
}

// Two qubits emitting into the same field modes: J = sigma_- (x) 1 + 1 (x) sigma_-.
inline Scenario preset_common_bath(double gamma) {
  detail::require_rate(gamma, "preset_common_bath");
  const Mat4 j = lift_a(pauli::lower()) + lift_b(pauli::lower());
  Scenario s(Mat4{}, {joint_channel("collective", j, gamma)});
  s.label = "common_bath";
  return s;
}

// Each local channel J (rate gamma) becomes J + alpha and J - alpha, each at gamma / 2.
inline Scenario with_homodyne_shift(const Scenario& s, const std::vector<cplx>& shifts) {
  if (shifts.size() != s.channels().size())
    throw ConfigError("with_homodyne_shift: one shift per channel required");
  std::vector<JumpChannel> out;
  for (std::size_t i = 0; i < shifts.size(); ++i) {
    const auto& c = s.channels()[i];
    if (!c.is_local()) throw ConfigError("with_homodyne_shift: joint channel '" + c.id + "' cannot be shifted");
    if (c.shift) throw ConfigError("with_homodyne_shift: channel '" + c.id + "' is already shifted");
    for (int sign : {+1, -1}) {
      JumpChannel d = c;
      d.id = c.id + (sign > 0 ? "+a" : "-a");
      d.rate = 0.5 * c.rate;
      d.shift = static_cast<double>(sign) * shifts[i];
      out.push_back(std::move(d));
    }
  }
  return s.with_channels(std::move(out));
}

// Heterodyne detection: J +- alpha e^{i Omega t}, each at gamma / 2.
inline Scenario with_heterodyne(const Scenario& s, const std::vector<double>& amplitudes,
                                const std::vector<double>& freqs) {
  if (amplitudes.size() != s.channels().size() || freqs.size() != s.channels().size())
    throw ConfigError("with_heterodyne: one amplitude and one frequency per channel required");
  for (std::size_t i = 0; i < amplitudes.size(); ++i)
    if (!(amplitudes[i] > 0.0) || !(freqs[i] > 0.0))
      throw ConfigError("with_heterodyne: amplitudes and frequencies must be positive");
  std::vector<cplx> shifts(amplitudes.begin(), amplitudes.end());
  Scenario shifted = with_homodyne_shift(s, shifts);
  std::vector<JumpChannel> channels = shifted.channels();
  for (std::size_t i = 0; i < channels.size(); ++i) channels[i].het_freq = freqs[i / 2];
  return shifted.with_channels(std::move(channels));
}

// Laser phases: J -> e^{-i theta} J. Leaves the master equation unchanged.
inline Scenario with_laser_phases(const Scenario& s, const std::vector<double>& thetas) {
  if (thetas.size() != s.channels().size()) throw ConfigError("with_laser_phases: one phase per channel required");
  std::vector<JumpChannel> out = s.channels();
  for (std::size_t i = 0; i < out.size(); ++i) {
    const cplx ph = std::exp(-kI * thetas[i]);
    std::visit([ph](auto& m) { m *= ph; }, out[i].op);
  }
  return s.with_channels(std::move(out));
}

// ---------------------------- Lindblad generator ------------------------------

// -i[H0, rho] + sum gamma (J rho J^dagger - 1/2 {J^dagger J, rho}), channels at time t.
inline Mat4 apply_generator(const Scenario& s, const Mat4& rho, double t = 0.0) {
  Mat4 out = (-kI) * (s.h0() * rho - rho * s.h0());
  const Mat4 k = s.time_dependent() ? s.damping_at(t) : s.damping();
  out -= k * rho + rho * k;
  for (const auto& c : s.channels()) {
    if (c.rate == 0.0) continue;
    const Mat4 j = c.lifted(t);
    out += cplx(c.rate) * (j * rho * adjoint(j));
  }
  return out;
}

using Superoperator = SquareMatrix<16>;

// Generator as a 16x16 matrix acting on column-stacked rho (index col * 4 + row).
inline Superoperator lindblad_generator(const Scenario& s, double t = 0.0) {
  Superoperator g;
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t r = 0; r < 4; ++r) {
      Mat4 e;
      e(r, c) = 1.0;
      const Mat4 img = apply_generator(s, e, t);
      const std::size_t in = c * 4 + r;
      for (std::size_t cc = 0; cc < 4; ++cc)
        for (std::size_t rr = 0; rr < 4; ++rr) g(cc * 4 + rr, in) = img(rr, cc);
    }
  return g;
}

struct ValidationReport {
  std::vector<std::string> violations;
  std::optional<double> generator_distance;  // max |entry| of the superoperator difference

  bool ok() const { return violations.empty(); }
};

inline constexpr double kGeneratorTol = 1e-10;

// Structural and physical checks; compares generators when a reference is given.
inline ValidationReport validate_scenario(const Scenario& s, const Scenario* reference = nullptr) {
  ValidationReport rep;
  auto add = [&rep](std::string v) { rep.violations.push_back(std::move(v)); };

  if (!all_finite(s.h0())) add("h0 has non-finite entries");
  else if (hermiticity_defect(s.h0()) > 1e-10) add("h0 is not Hermitian");

  for (const auto& c : s.channels()) {
    if (!std::isfinite(c.rate)) add("channel '" + c.id + "': non-finite rate");
    else if (c.rate < 0.0) add("channel '" + c.id + "': negative rate " + std::to_string(c.rate));
    const bool finite = std::visit([](const auto& m) { return all_finite(m); }, c.op);
    if (!finite) add("channel '" + c.id + "': non-finite operator entries");
    if (c.het_freq && !c.shift) add("channel '" + c.id + "': heterodyne frequency without a shift amplitude");
    if (c.shift && !(std::isfinite(c.shift->real()) && std::isfinite(c.shift->imag())))
      add("channel '" + c.id + "': non-finite shift");
  }
  if (!rep.ok()) return rep;

  const Mat4& k = s.damping();
  try {
    const auto eig = herm_eig4(k, 1e-9);
    if (eig.values[3] < -1e-10) add("damping operator K is not positive semidefinite (min eigenvalue " +
                                    std::to_string(eig.values[3]) + ")");
  } catch (const std::exception& e) {
    add(std::string("damping operator K: ") + e.what());
  }
  if (max_abs_entry(s.effective_hamiltonian() - (s.h0() - kI * k)) > 1e-12) add("H_eff != H0 - iK");

  if (s.time_dependent()) {
    for (double t : {0.37, 1.9, 5.3}) {
      if (max_abs_entry(s.damping_at(t) - k) > 1e-10) {
        add("damping operator varies in time (unpaired heterodyne channel)");
        break;
      }
    }
  }

  if (reference != nullptr) {
    const double d = max_abs_entry(lindblad_generator(s) - lindblad_generator(*reference));
    rep.generator_distance = d;
    if (d > kGeneratorTol) add("Lindblad generator differs from reference by " + std::to_string(d));
  }
  return rep;
}

}  // namespace trajent

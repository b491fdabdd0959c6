// config.hpp - scenario files.
//
// A scenario file is a JSON object with the keys
//
//   preset          photon_counting | thermal | dephasing | rotated_thermal |
//                   common_bath | custom
//   params          preset parameters and optional measurement transforms
//   initial_state   four amplitudes on (uu, ud, du, dd), each [re, im] or a
//                   real number; renormalized on load
//   custom_channels explicit channels appended to the preset's
//   run             optional defaults for the command-line run parameters
//
// Unknown keys anywhere are rejected. Complex numbers are written [re, im];
// matrices are row-major lists of rows. The README lists every key.

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "trajent/errors.hpp"
#include "trajent/linalg.hpp"
#include "trajent/model.hpp"
#include "trajent/state.hpp"

namespace trajent {

struct RunDefaults {
  std::optional<double> t_max;
  std::optional<double> dt;
  std::optional<double> grid;
  std::optional<std::size_t> traj;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> unraveling;
};

struct LoadedScenario {
  std::string preset;
  Scenario scenario;
  RunDefaults run;
};

namespace config_detail {

using nlohmann::json;

[[noreturn]] inline void fail(const std::string& path, const std::string& msg) {
  throw ConfigError("scenario config: " + (path.empty() ? std::string("/") : path) + ": " + msg);
}

inline void check_keys(const json& obj, const std::string& path, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(path, "expected an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) fail(path + "/" + key, "unknown key");
}

inline double get_number(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(path, "number must be finite");
  return x;
}

inline cplx get_complex(const json& v, const std::string& path) {
  if (v.is_number()) return get_number(v, path);
  if (v.is_array() && v.size() == 2) return {get_number(v[0], path + "/0"), get_number(v[1], path + "/1")};
  fail(path, "expected a complex number [re, im] or a real number");
}

template <std::size_t N>
SquareMatrix<N> get_matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != N) fail(path, "expected " + std::to_string(N) + " rows");
  SquareMatrix<N> m;
  for (std::size_t r = 0; r < N; ++r) {
    const auto rp = path + "/" + std::to_string(r);
    if (!v[r].is_array() || v[r].size() != N) fail(rp, "expected " + std::to_string(N) + " entries");
    for (std::size_t c = 0; c < N; ++c) m(r, c) = get_complex(v[r][c], rp + "/" + std::to_string(c));
  }
  return m;
}

inline std::vector<double> get_reals(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected a list of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_number(v[i], path + "/" + std::to_string(i)));
  return out;
}

inline std::vector<cplx> get_complexes(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected a list of complex numbers");
  std::vector<cplx> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(get_complex(v[i], path + "/" + std::to_string(i)));
  return out;
}

inline std::array<double, 3> get_vec3(const json& v, const std::string& path) {
  const auto r = get_reals(v, path);
  if (r.size() != 3) fail(path, "expected three components");
  return {r[0], r[1], r[2]};
}

inline MixingMatrix get_mixing(const json& v, const std::string& path) {
  if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "identity") return identity_mixing();
    if (s == "balanced") return balanced_mixing();
    fail(path, "unknown mixing shorthand '" + s + "' (identity | balanced)");
  }
  if (!v.is_array() || v.empty()) fail(path, "expected a list of rows [u_plus, u_minus]");
  MixingMatrix m;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto rp = path + "/" + std::to_string(i);
    if (!v[i].is_array() || v[i].size() != 2) fail(rp, "each row needs two entries (sigma_+, sigma_-)");
    m.push_back({get_complex(v[i][0], rp + "/0"), get_complex(v[i][1], rp + "/1")});
  }
  return m;
}

inline double require_number(const json& params, const char* key) {
  if (!params.contains(key)) fail(std::string("/params/") + key, "missing required parameter");
  return get_number(params.at(key), std::string("/params/") + key);
}

inline const std::set<std::string>& transform_keys() {
  static const std::set<std::string> k{"hamiltonian_a",        "hamiltonian_b",       "homodyne_shifts",
                                       "laser_phases",         "heterodyne_amplitudes", "heterodyne_freqs"};
  return k;
}

inline std::set<std::string> with_transforms(std::set<std::string> keys) {
  keys.insert(transform_keys().begin(), transform_keys().end());
  return keys;
}

inline Scenario build_preset(const std::string& preset, const json& p) {
  if (preset == "photon_counting") {
    check_keys(p, "/params", with_transforms({"gamma_a", "gamma_b"}));
    return preset_photon_counting(require_number(p, "gamma_a"), require_number(p, "gamma_b"));
  }
  const std::set<std::string> thermal_keys{"gamma_plus_a", "gamma_minus_a", "gamma_plus_b", "gamma_minus_b"};
  auto thermal = [&p] {
    return ThermalRates{require_number(p, "gamma_plus_a"), require_number(p, "gamma_minus_a"),
                        require_number(p, "gamma_plus_b"), require_number(p, "gamma_minus_b")};
  };
  if (preset == "thermal") {
    check_keys(p, "/params", with_transforms(thermal_keys));
    return preset_thermal(thermal());
  }
  if (preset == "rotated_thermal") {
    auto keys = thermal_keys;
    keys.insert({"mixing_a", "mixing_b", "outcome_rates_a", "outcome_rates_b"});
    check_keys(p, "/params", with_transforms(keys));
    const MixingMatrix ua = p.contains("mixing_a") ? get_mixing(p.at("mixing_a"), "/params/mixing_a") : balanced_mixing();
    const MixingMatrix ub = p.contains("mixing_b") ? get_mixing(p.at("mixing_b"), "/params/mixing_b") : balanced_mixing();
    std::vector<double> ra, rb;
    if (p.contains("outcome_rates_a")) ra = get_reals(p.at("outcome_rates_a"), "/params/outcome_rates_a");
    if (p.contains("outcome_rates_b")) rb = get_reals(p.at("outcome_rates_b"), "/params/outcome_rates_b");
    return preset_rotated_thermal(ua, ub, thermal(), ra, rb);
  }
  if (preset == "dephasing") {
    check_keys(p, "/params", with_transforms({"gamma_a", "gamma_b", "v_a", "v_b"}));
    const auto va = p.contains("v_a") ? get_vec3(p.at("v_a"), "/params/v_a") : diagonal_dephasing_axis();
    const auto vb = p.contains("v_b") ? get_vec3(p.at("v_b"), "/params/v_b") : diagonal_dephasing_axis();
    return preset_dephasing(va, vb, require_number(p, "gamma_a"), require_number(p, "gamma_b"));
  }
  if (preset == "common_bath") {
    check_keys(p, "/params", with_transforms({"gamma"}));
    return preset_common_bath(require_number(p, "gamma"));
  }
  if (preset == "custom") {
    check_keys(p, "/params", transform_keys());
    Scenario s;
    s.label = "custom";
    return s;
  }
  fail("/preset", "unknown preset '" + preset + "'");
}

inline std::vector<JumpChannel> parse_custom_channels(const json& v) {
  if (!v.is_array()) fail("/custom_channels", "expected a list of channels");
  std::vector<JumpChannel> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const auto path = "/custom_channels/" + std::to_string(i);
    const auto& c = v[i];
    check_keys(c, path, {"id", "locality", "rate", "op"});
    if (!c.contains("locality") || !c.at("locality").is_string()) fail(path + "/locality", "expected a string");
    if (!c.contains("op")) fail(path + "/op", "missing operator");
    if (!c.contains("rate")) fail(path + "/rate", "missing rate");
    const auto loc = c.at("locality").get<std::string>();
    const std::string id = c.contains("id") && c.at("id").is_string() ? c.at("id").get<std::string>()
                                                                       : "custom" + std::to_string(i);
    const double rate = get_number(c.at("rate"), path + "/rate");
    if (rate < 0.0) fail(path + "/rate", "rate must be >= 0");
    if (loc == "qubit-A" || loc == "qubit-B") {
      out.push_back(local_channel(id, loc == "qubit-A" ? Locality::QubitA : Locality::QubitB,
                                  get_matrix<2>(c.at("op"), path + "/op"), rate));
    } else if (loc == "joint") {
      out.push_back(joint_channel(id, get_matrix<4>(c.at("op"), path + "/op"), rate));
    } else {
      fail(path + "/locality", "expected qubit-A, qubit-B or joint");
    }
  }
  return out;
}

inline QubitPairState parse_initial_state(const json& v) {
  if (!v.is_array() || v.size() != 4) fail("/initial_state", "expected four amplitudes (uu, ud, du, dd)");
  Vec4 a;
  for (std::size_t i = 0; i < 4; ++i) a[i] = get_complex(v[i], "/initial_state/" + std::to_string(i));
  const double n2 = squared_norm(a);
  if (!(n2 > 0.0)) fail("/initial_state", "zero vector");
  if (std::abs(n2 - 1.0) > 1e-6)
    spdlog::warn("scenario config: initial_state has squared norm {:.9g}; normalizing", n2);
  return QubitPairState::normalized(a);
}

inline RunDefaults parse_run(const json& v) {
  check_keys(v, "/run", {"t_max", "dt", "grid", "traj", "seed", "unraveling"});
  RunDefaults r;
  if (v.contains("t_max")) r.t_max = get_number(v.at("t_max"), "/run/t_max");
  if (v.contains("dt")) r.dt = get_number(v.at("dt"), "/run/dt");
  if (v.contains("grid")) r.grid = get_number(v.at("grid"), "/run/grid");
  if (v.contains("traj")) {
    if (!v.at("traj").is_number_unsigned()) fail("/run/traj", "expected a positive integer");
    r.traj = v.at("traj").get<std::size_t>();
  }
  if (v.contains("seed")) {
    if (!v.at("seed").is_number_unsigned()) fail("/run/seed", "expected a non-negative integer");
    r.seed = v.at("seed").get<std::uint64_t>();
  }
  if (v.contains("unraveling")) {
    if (!v.at("unraveling").is_string()) fail("/run/unraveling", "expected a string");
    r.unraveling = v.at("unraveling").get<std::string>();
  }
  return r;
}

}  // namespace config_detail

inline LoadedScenario parse_scenario_config(const std::string& text) {
  using namespace config_detail;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("scenario config: malformed JSON: ") + e.what());
  }
  check_keys(doc, "", {"preset", "params", "initial_state", "custom_channels", "run"});
  if (!doc.contains("preset") || !doc.at("preset").is_string()) fail("/preset", "missing or not a string");

  LoadedScenario out;
  out.preset = doc.at("preset").get<std::string>();
  const json params = doc.contains("params") ? doc.at("params") : json::object();
  if (!params.is_object()) fail("/params", "expected an object");

  Scenario s = build_preset(out.preset, params);
  std::vector<JumpChannel> channels = s.channels();
  if (doc.contains("custom_channels")) {
    auto extra = parse_custom_channels(doc.at("custom_channels"));
    channels.insert(channels.end(), extra.begin(), extra.end());
  }

  Mat4 h0 = s.h0();
  if (params.contains("hamiltonian_a") || params.contains("hamiltonian_b")) {
    const Mat2 ha = params.contains("hamiltonian_a") ? get_matrix<2>(params.at("hamiltonian_a"), "/params/hamiltonian_a")
                                                     : Mat2{};
    const Mat2 hb = params.contains("hamiltonian_b") ? get_matrix<2>(params.at("hamiltonian_b"), "/params/hamiltonian_b")
                                                     : Mat2{};
    if (hermiticity_defect(ha) > 1e-12 || hermiticity_defect(hb) > 1e-12) fail("/params", "Hamiltonians must be Hermitian");
    h0 = local_hamiltonian(ha, hb);
  }
  const QubitPairState init =
      doc.contains("initial_state") ? parse_initial_state(doc.at("initial_state")) : states::bell_phi();

  Scenario built(h0, std::move(channels), init);
  built.label = s.label;
  if (s.thermal_rates() && !doc.contains("custom_channels")) built.set_thermal_rates(*s.thermal_rates());

  if (params.contains("laser_phases"))
    built = with_laser_phases(built, get_reals(params.at("laser_phases"), "/params/laser_phases"));
  const bool homodyne = params.contains("homodyne_shifts");
  const bool heterodyne = params.contains("heterodyne_amplitudes") || params.contains("heterodyne_freqs");
  if (homodyne && heterodyne) fail("/params", "homodyne_shifts and heterodyne settings are mutually exclusive");
  if (homodyne) built = with_homodyne_shift(built, get_complexes(params.at("homodyne_shifts"), "/params/homodyne_shifts"));
  if (heterodyne) {
    if (!params.contains("heterodyne_amplitudes") || !params.contains("heterodyne_freqs"))
      fail("/params", "heterodyne needs both heterodyne_amplitudes and heterodyne_freqs");
    built = with_heterodyne(built, get_reals(params.at("heterodyne_amplitudes"), "/params/heterodyne_amplitudes"),
                            get_reals(params.at("heterodyne_freqs"), "/params/heterodyne_freqs"));
  }

  if (auto rep = validate_scenario(built); !rep.ok()) fail("", rep.violations.front());
  out.scenario = std::move(built);
  if (doc.contains("run")) out.run = parse_run(doc.at("run"));
  return out;
}

inline LoadedScenario load_scenario_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("scenario config: cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_config(buf.str());
}

}  // namespace trajent

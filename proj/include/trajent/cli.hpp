// cli.hpp - the trajent command-line front end.
//
//   simulate   ensemble mean concurrence next to the closed form and C_rho
//   master     density-matrix concurrence, entanglement and purity
//   rates      disentanglement rates for a scenario (JSON)
//   fit        exponential rate fitted to a simulate CSV (JSON)
//   optimize   best jump unraveling for a thermal scenario (JSON)
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "trajent/analytics.hpp"
#include "trajent/config.hpp"
#include "trajent/ensemble.hpp"
#include "trajent/entanglement.hpp"
#include "trajent/errors.hpp"
#include "trajent/lindblad.hpp"
#include "trajent/model.hpp"
#include "trajent/optimize.hpp"
#include "trajent/stats.hpp"

namespace trajent {

struct RunConfig {
  std::string command;
  std::string scenario_path;
  std::string input_path;  // fit only
  double t_max = 0.0;
  double dt = 0.0;
  double record_grid = 0.0;
  std::size_t n_traj = 1000;
  std::uint64_t seed = 1;
  std::string unraveling = "qj";
  std::string out_path;  // empty: stdout
  unsigned threads = 0;
};

// Values given on the command line; unset ones fall back to the scenario's
// run block and then to defaults derived from the rates.
struct RunOverrides {
  std::optional<double> t_max;
  std::optional<double> dt;
  std::optional<double> grid;
  std::optional<std::size_t> traj;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> unraveling;
};

inline double default_step(const Scenario& s, double t_max) {
  const double g = s.max_rate();
  const double k2 = herm_eig4(2.0 * s.damping()).values[0];
  double dt = 1e-3 * t_max;
  if (g > 0.0) dt = std::min(dt, 1e-3 / g);
  if (k2 > 0.0) dt = std::min(dt, 1e-2 / k2);
  return dt;
}

inline RunConfig resolve_run_config(const LoadedScenario& ls, const RunOverrides& o, std::string command) {
  RunConfig rc;
  rc.command = std::move(command);
  const double g = ls.scenario.max_rate();
  rc.t_max = o.t_max.value_or(ls.run.t_max.value_or(g > 0.0 ? 3.0 / g : 3.0));
  if (!(rc.t_max > 0.0)) throw ConfigError("run: t_max must be positive");
  rc.dt = o.dt.value_or(ls.run.dt.value_or(default_step(ls.scenario, rc.t_max)));
  rc.record_grid = o.grid.value_or(ls.run.grid.value_or(rc.t_max / 60.0));
  rc.n_traj = o.traj.value_or(ls.run.traj.value_or(1000));
  rc.seed = o.seed.value_or(ls.run.seed.value_or(1));
  rc.unraveling = o.unraveling.value_or(ls.run.unraveling.value_or("qj"));
  if (!(rc.dt > 0.0) || rc.dt > rc.record_grid * (1.0 + 1e-12) || rc.record_grid > rc.t_max * (1.0 + 1e-12))
    throw ConfigError("run: need 0 < dt <= grid <= tmax");
  if (rc.n_traj < 1) throw ConfigError("run: traj must be >= 1");
  if (rc.unraveling != "qj" && rc.unraveling != "qsd-homodyne" && rc.unraveling != "qsd-heterodyne" &&
      rc.unraveling != "master")
    throw ConfigError("run: unknown unraveling '" + rc.unraveling + "'");
  return rc;
}

namespace cli_detail {

inline std::string fmt_real(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", x);
  return buf;
}

// Closed-form mean concurrence for the chosen unraveling, when one exists.
inline std::optional<std::vector<double>> analytic_curve(const Scenario& s, const std::string& unraveling,
                                                         const std::vector<double>& times) {
  const double c0 = concurrence_pure(s.initial());
  std::optional<double> kappa;
  if (s.all_local()) {
    if (unraveling == "qj" && !s.time_dependent()) kappa = kappa_qj(s);
    if (unraveling == "qsd-homodyne") kappa = kappa_ho(s);
    if (unraveling == "qsd-heterodyne") kappa = kappa_het(s);
  }
  std::vector<double> out;
  if (kappa) {
    for (double t : times) out.push_back(mean_concurrence_independent(std::min(c0, 1.0), std::max(*kappa, 0.0), t));
    return out;
  }
  if (unraveling == "qj" && s.all_local()) {
    // Time-dependent detected operators: C0 exp(-integral of kappa_qj(t)),
    // trapezoid rule with 64 panels per recording interval.
    double integral = 0.0;
    out.push_back(std::min(c0, 1.0));
    for (std::size_t k = 1; k < times.size(); ++k) {
      const double h = (times[k] - times[k - 1]) / 64.0;
      for (int i = 0; i < 64; ++i) {
        const double a = times[k - 1] + i * h;
        integral += 0.5 * h * (kappa_qj(s, a) + kappa_qj(s, a + h));
      }
      out.push_back(std::min(c0, 1.0) * std::exp(-integral));
    }
    return out;
  }
  const bool bare_common_bath = s.label == "common_bath" && s.channels().size() == 1 && !s.has_shifts() &&
                                max_abs_entry(s.h0()) == 0.0;
  if (unraveling == "qj" && bare_common_bath) {
    const auto curve = CommonBathCurve::from_state(s.initial(), s.channels().front().rate);
    for (double t : times) out.push_back(common_bath_mean(curve, t));
    return out;
  }
  return std::nullopt;
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline double parse_cell(const std::string& cell, std::size_t row, const std::string& column) {
  std::string c = cell;
  while (!c.empty() && (c.back() == '\r' || c.back() == ' ')) c.pop_back();
  while (!c.empty() && c.front() == ' ') c.erase(c.begin());
  if (c == "nan" || c == "NaN") return std::nan("");
  try {
    std::size_t used = 0;
    const double x = std::stod(c, &used);
    if (used != c.size()) throw std::invalid_argument(c);
    return x;
  } catch (const std::exception&) {
    throw ConfigError("fit: line " + std::to_string(row) + ", column '" + column + "': not a number ('" + c + "')");
  }
}

inline nlohmann::json fit_to_json(const RateFit& f) {
  // + 0.0 turns a fitted -0.0 into 0.0.
  return {{"rate", f.rate + 0.0}, {"rate_stderr", f.rate_stderr}, {"amplitude", f.amplitude},
          {"t_lo", f.t_lo},   {"t_hi", f.t_hi},               {"r_squared", f.r_squared},
          {"points", f.points}};
}

inline nlohmann::json complex_json(cplx z) { return nlohmann::json::array({z.real(), z.imag()}); }

}  // namespace cli_detail

inline std::string simulate_csv(const Scenario& s, const RunConfig& rc) {
  const auto sol = evolve_rho(s, rc.t_max, rc.dt, rc.record_grid);
  const std::size_t n = sol.times.size();
  std::vector<double> mean(n, std::nan("")), err(n, std::nan(""));
  if (rc.unraveling != "master") {
    const Unraveling kind = rc.unraveling == "qj"             ? Unraveling::QuantumJump
                            : rc.unraveling == "qsd-homodyne" ? Unraveling::HomodyneDiffusion
                                                              : Unraveling::HeterodyneDiffusion;
    EnsembleOptions opt;
    opt.n_traj = rc.n_traj;
    opt.seed = rc.seed;
    opt.threads = rc.threads;
    const auto res = run_ensemble(s, kind, rc.t_max, rc.dt, rc.record_grid, opt);
    mean = res.summary.mean_c;
    err = res.summary.stderr_c;
  }
  const auto analytic = cli_detail::analytic_curve(s, rc.unraveling, sol.times);

  std::string out = "t,mean_C,stderr_C,analytic_C,C_rho\n";
  for (std::size_t k = 0; k < n; ++k) {
    out += cli_detail::fmt_real(sol.times[k]) + ',' + cli_detail::fmt_real(mean[k]) + ',' +
           cli_detail::fmt_real(err[k]) + ',' + cli_detail::fmt_real(analytic ? (*analytic)[k] : std::nan("")) + ',' +
           cli_detail::fmt_real(concurrence_mixed(sol.states[k])) + '\n';
  }
  return out;
}

inline std::string master_csv(const Scenario& s, const RunConfig& rc) {
  const auto sol = evolve_rho(s, rc.t_max, rc.dt, rc.record_grid);
  std::string out = "t,C_rho,E_rho,purity\n";
  for (std::size_t k = 0; k < sol.times.size(); ++k) {
    const Mat4& rho = sol.states[k].rho;
    const double c = concurrence_mixed(rho);
    out += cli_detail::fmt_real(sol.times[k]) + ',' + cli_detail::fmt_real(c) + ',' +
           cli_detail::fmt_real(eof_from_concurrence(c)) + ',' + cli_detail::fmt_real(trace(rho * rho).real()) + '\n';
  }
  return out;
}

inline nlohmann::json rates_json(const Scenario& s) {
  const RateReport r = rate_report(s);
  nlohmann::json j;
  j["scenario"] = s.label;
  j["kappa_qj"] = r.kappa_qj;
  j["kappa_ho"] = r.kappa_ho;
  j["kappa_ho_opt"] = r.kappa_ho_opt;
  j["kappa_het"] = r.kappa_het;
  if (r.kappa_qj_opt_thermal) j["kappa_qj_opt_thermal"] = *r.kappa_qj_opt_thermal;
  j["per_channel"] = nlohmann::json::array();
  for (const auto& c : r.per_channel)
    j["per_channel"].push_back({{"id", c.id}, {"qj", c.qj}, {"ho", c.ho}, {"ho_opt", c.ho_opt}, {"het", c.het}});
  return j;
}

// Fits the mean_C column of a simulate CSV; when analytic_C is present the
// closed form is fitted over the same window with the same relative weights.
inline nlohmann::json fit_json(const std::string& csv_text) {
  std::istringstream in(csv_text);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("fit: empty input");
  const auto header = cli_detail::split_csv_line(line);
  auto column = [&](const std::string& name) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < header.size(); ++i) {
      std::string h = header[i];
      while (!h.empty() && (h.back() == '\r' || h.back() == ' ')) h.pop_back();
      if (h == name) return i;
    }
    return std::nullopt;
  };
  const auto it = column("t"), im = column("mean_C"), is = column("stderr_C"), ia = column("analytic_C");
  if (!it || !im || !is) throw ConfigError("fit: header must contain t, mean_C and stderr_C");

  std::vector<double> t, mean, err, analytic;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    const auto cells = cli_detail::split_csv_line(line);
    if (cells.size() != header.size())
      throw ConfigError("fit: line " + std::to_string(row) + ": expected " + std::to_string(header.size()) +
                        " fields, got " + std::to_string(cells.size()));
    t.push_back(cli_detail::parse_cell(cells[*it], row, "t"));
    mean.push_back(cli_detail::parse_cell(cells[*im], row, "mean_C"));
    err.push_back(cli_detail::parse_cell(cells[*is], row, "stderr_C"));
    if (ia) analytic.push_back(cli_detail::parse_cell(cells[*ia], row, "analytic_C"));
  }
  if (t.empty()) throw ConfigError("fit: no data rows");

  const auto outcome = fit_rate(t, mean, err);
  if (!outcome.fit) throw NumericalError(outcome.diagnostic);
  nlohmann::json j = cli_detail::fit_to_json(*outcome.fit);

  const std::size_t n = outcome.fit->points;
  bool have_analytic = ia.has_value();
  for (std::size_t k = 0; have_analytic && k < n; ++k) have_analytic = std::isfinite(analytic[k]) && analytic[k] > 0.0;
  if (have_analytic) {
    const std::vector<double> ta(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(n));
    const std::vector<double> ya(analytic.begin(), analytic.begin() + static_cast<std::ptrdiff_t>(n));
    std::vector<double> ea(n);
    for (std::size_t k = 0; k < n; ++k) ea[k] = ya[k] * err[k] / mean[k];
    const auto ref = fit_rate(ta, ya, ea);
    if (ref.fit) {
      const double diff = std::abs(outcome.fit->rate - ref.fit->rate);
      j["analytic_rate"] = ref.fit->rate + 0.0;
      j["absolute_difference"] = diff;
      // A vanishing analytic rate has no meaningful relative error.
      if (std::abs(ref.fit->rate) > 1e-12) j["relative_difference"] = diff / std::abs(ref.fit->rate);
      else j["relative_difference"] = nullptr;
    }
  }
  return j;
}

inline nlohmann::json optimize_json(const Scenario& s, std::uint64_t seed, int restarts = 32) {
  if (!s.thermal_rates())
    throw ConfigError("optimize: unsupported scenario type '" + s.label +
                      "' (needs a thermal, photon_counting or rotated_thermal preset)");
  const auto best = optimize_unraveling(*s.thermal_rates(), restarts, seed);
  auto qubit = [](const QubitScheme& q) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : q.mixing) rows.push_back({cli_detail::complex_json(r[0]), cli_detail::complex_json(r[1])});
    return nlohmann::json{{"mixing", rows},
                          {"angles",
                           {{"mix", q.angles.mix},
                            {"phase_a", q.angles.phase_a},
                            {"phase_b", q.angles.phase_b},
                            {"global", q.angles.global}}},
                          {"rate", q.rate}};
  };
  return {{"qubit_a", qubit(best.qubit_a)},
          {"qubit_b", qubit(best.qubit_b)},
          {"achieved", best.achieved},
          {"reference", best.reference},
          {"difference", best.achieved - best.reference}};
}

inline void configure_logging() {
  auto logger = spdlog::get("trajent");
  if (!logger) logger = spdlog::stderr_color_mt("trajent");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("TRAJENT_LOG")) {
    const auto lvl = spdlog::level::from_str(env);
    if (lvl == spdlog::level::off && std::string(env) != "off")
      spdlog::warn("TRAJENT_LOG='{}' not recognized; keeping 'warn'", env);
    else
      spdlog::set_level(lvl);
  }
}

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"trajent: entanglement of two qubits along quantum trajectories"};
  app.require_subcommand(1);

  RunOverrides o;
  std::string config_path, out_path, input_path;
  unsigned threads = 0;
  std::string unraveling;

  auto add_run_flags = [&](CLI::App* sub, bool ensemble) {
    sub->add_option("--config", config_path, "scenario JSON file")->required();
    sub->add_option("--tmax", o.t_max, "final time");
    sub->add_option("--dt", o.dt, "integration step");
    sub->add_option("--grid", o.grid, "recording interval");
    sub->add_option("--out", out_path, "output file (default stdout)");
    if (ensemble) {
      sub->add_option("--seed", o.seed, "master seed");
      sub->add_option("--traj", o.traj, "number of trajectories");
      sub->add_option("--threads", threads, "worker threads (0: all cores)");
      sub->add_option("--unraveling", o.unraveling, "qj | qsd-homodyne | qsd-heterodyne | master")
          ->check(CLI::IsMember({"qj", "qsd-homodyne", "qsd-heterodyne", "master"}));
    }
  };

  auto* simulate = app.add_subcommand("simulate", "ensemble mean concurrence, closed form and C_rho (CSV)");
  add_run_flags(simulate, true);
  auto* master = app.add_subcommand("master", "density-matrix concurrence and purity (CSV)");
  add_run_flags(master, false);
  auto* rates = app.add_subcommand("rates", "disentanglement rates (JSON)");
  rates->add_option("--config", config_path, "scenario JSON file")->required();
  rates->add_option("--out", out_path, "output file (default stdout)");
  auto* fit = app.add_subcommand("fit", "fit an exponential rate to a simulate CSV (JSON)");
  fit->add_option("input", input_path, "CSV produced by simulate")->required();
  fit->add_option("--out", out_path, "output file (default stdout)");
  auto* optimize = app.add_subcommand("optimize", "best jump unraveling of a thermal scenario (JSON)");
  optimize->add_option("--config", config_path, "scenario JSON file")->required();
  optimize->add_option("--seed", o.seed, "optimizer seed");
  optimize->add_option("--out", out_path, "output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  auto emit = [&](const std::string& text) {
    if (out_path.empty()) {
      out << text;
      return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw ConfigError("cannot write '" + out_path + "'");
    f << text;
  };

  try {
    if (*fit) {
      std::ifstream f(input_path);
      if (!f) throw ConfigError("fit: cannot open '" + input_path + "'");
      std::ostringstream buf;
      buf << f.rdbuf();
      emit(fit_json(buf.str()).dump(2) + "\n");
      return 0;
    }
    const LoadedScenario ls = load_scenario_config(config_path);
    if (*rates) {
      emit(rates_json(ls.scenario).dump(2) + "\n");
    } else if (*optimize) {
      emit(optimize_json(ls.scenario, o.seed.value_or(7)).dump(2) + "\n");
    } else {
      RunConfig rc = resolve_run_config(ls, o, *simulate ? "simulate" : "master");
      rc.threads = threads;
      rc.out_path = out_path;
      spdlog::info("{}: t_max={} dt={} grid={} traj={} seed={} unraveling={}", rc.command, rc.t_max, rc.dt,
                   rc.record_grid, rc.n_traj, rc.seed, rc.unraveling);
      emit(*simulate ? simulate_csv(ls.scenario, rc) : master_csv(ls.scenario, rc));
    }
    return 0;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    err << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace trajent

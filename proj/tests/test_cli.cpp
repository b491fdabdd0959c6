#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "trajent/cli.hpp"

using namespace trajent;

namespace {

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult run(std::vector<std::string> args) {
  configure_logging();
  args.insert(args.begin(), "trajent");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string scenario_path(const std::string& name) { return std::string(TRAJENT_SCENARIO_DIR) + "/" + name; }

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

std::filesystem::path temp_file(const std::string& name) { return std::filesystem::temp_directory_path() / name; }

}  // namespace

TEST(Cli, RatesForPhotonCounting) {
  const auto r = run({"rates", "--config", scenario_path("photon_counting.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["kappa_qj"].get<double>(), 1.0, 1e-15);
  EXPECT_NEAR(j["kappa_het"].get<double>(), 1.0, 1e-15);
  EXPECT_NEAR(j["kappa_qj_opt_thermal"].get<double>(), 1.0, 1e-15);
  EXPECT_EQ(j["per_channel"].size(), 2u);
}

TEST(Cli, RatesRefuseJointChannels) {
  const auto r = run({"rates", "--config", scenario_path("fig3_common_bath.json")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("joint"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"simulate"}).code, 2);
  EXPECT_EQ(run({"simulate", "--config", scenario_path("photon_counting.json"), "--bogus"}).code, 2);
  EXPECT_EQ(run({"simulate", "--config", scenario_path("missing.json")}).code, 2);
  EXPECT_EQ(run({"simulate", "--config", scenario_path("photon_counting.json"), "--unraveling", "psychic"}).code, 2);
  EXPECT_EQ(run({"simulate", "--config", scenario_path("photon_counting.json"), "--dt", "0.5"}).code, 2);
  EXPECT_EQ(run({"optimize", "--config", scenario_path("fig3_common_bath.json")}).code, 2);

  const auto bad = temp_file("trajent_test_huge.json");
  std::ofstream(bad) << R"({"preset": "photon_counting", "params": {"gamma_a": 1, "gamma_b": 1,
    "hamiltonian_a": [[1e300, 0], [0, -1e300]]}, "run": {"traj": 4, "t_max": 0.1, "grid": 0.05}})";
  const auto r = run({"master", "--config", bad.string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("numerical failure"), std::string::npos);

  const auto short_csv = temp_file("trajent_test_short.csv");
  std::ofstream(short_csv) << "t,mean_C,stderr_C\n0,1,0\n0.1,0.5,0.3\n";
  EXPECT_EQ(run({"fit", short_csv.string()}).code, 3);
  EXPECT_EQ(run({"fit", temp_file("trajent_no_such.csv").string()}).code, 2);
}

TEST(Cli, SimulateIsDeterministicAcrossRunsAndThreads) {
  const std::vector<std::string> base{"simulate", "--config", scenario_path("fig1_thermal.json"), "--traj", "200",
                                      "--tmax", "0.5", "--seed", "9"};
  auto with_threads = [&](const char* n) {
    auto args = base;
    args.insert(args.end(), {"--threads", n});
    return run(args);
  };
  const auto a = with_threads("1"), b = with_threads("1"), c = with_threads("4");
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
  auto other = base;
  other[7] = "10";
  EXPECT_NE(run(other).out, a.out);
}

TEST(Cli, SimulateCsvLayout) {
  const auto r = run({"simulate", "--config", scenario_path("photon_counting.json"), "--traj", "50", "--tmax", "1",
                      "--grid", "0.25"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  ASSERT_EQ(rows.size(), 6u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "mean_C", "stderr_C", "analytic_C", "C_rho"}));
  // 17 significant digits in scientific notation.
  EXPECT_EQ(rows[1][0], "0.0000000000000000e+00");
  EXPECT_EQ(rows[5][0], "1.0000000000000000e+00");
  EXPECT_NEAR(std::stod(rows[5][3]), std::exp(-1.0), 1e-15);

  const auto m = run({"simulate", "--config", scenario_path("photon_counting.json"), "--unraveling", "master", "--tmax",
                      "1", "--grid", "0.5"});
  ASSERT_EQ(m.code, 0) << m.err;
  EXPECT_EQ(csv_rows(m.out)[2][1], "nan");
}

TEST(Cli, MasterCsv) {
  const auto r = run({"master", "--config", scenario_path("fig2_dephasing_phi0.json"), "--grid", "1"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto rows = csv_rows(r.out);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"t", "C_rho", "E_rho", "purity"}));
  EXPECT_NEAR(std::stod(rows[1][1]), 1.0, 1e-12);
  EXPECT_NEAR(std::stod(rows[1][3]), 1.0, 1e-12);
  EXPECT_EQ(std::stod(rows.back()[1]), 0.0);
}

TEST(Cli, WritesToOutputFile) {
  const auto path = temp_file("trajent_test_rates.json");
  std::filesystem::remove(path);
  const auto r = run({"rates", "--config", scenario_path("fig1_thermal.json"), "--out", path.string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in);
  EXPECT_NEAR(j["kappa_qj"].get<double>(), 3.0, 1e-14);
}

TEST(Cli, OptimizeReportsClosedForm) {
  const auto r = run({"optimize", "--config", scenario_path("fig1_thermal.json")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["achieved"].get<double>(), 3.0 - 2.0 * std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(j["reference"].get<double>(), 3.0 - 2.0 * std::sqrt(2.0), 1e-15);
}

TEST(Cli, FitRoundTripForEveryBundledScenario) {
  for (const auto& entry : std::filesystem::directory_iterator(TRAJENT_SCENARIO_DIR)) {
    if (entry.path().extension() != ".json") continue;
    const auto csv = temp_file("trajent_roundtrip_" + entry.path().stem().string() + ".csv");
    const auto sim = run({"simulate", "--config", entry.path().string(), "--out", csv.string()});
    ASSERT_EQ(sim.code, 0) << entry.path() << sim.err;
    const auto fit = run({"fit", csv.string()});
    ASSERT_EQ(fit.code, 0) << entry.path() << fit.err;
    const auto j = nlohmann::json::parse(fit.out);
    ASSERT_TRUE(j.contains("analytic_rate")) << entry.path();
    if (j["relative_difference"].is_null())
      EXPECT_LT(j["absolute_difference"].get<double>(), 0.02) << entry.path();
    else
      EXPECT_LT(j["relative_difference"].get<double>(), 0.1) << entry.path();
  }
}

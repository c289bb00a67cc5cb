#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "bellstab/harness.hpp"

using namespace bellstab;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("bellstab_test_" + std::to_string(std::rand()) + "_" +
            std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(bool(in));
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// Small, fast configuration for end-to-end command runs.
ordered_json tiny_config() {
  return ordered_json::parse(R"({
    "system": {"N_c": 4},
    "solver": {"t_final_us": 0.3, "rtol": 1e-6, "atol": 1e-8}
  })");
}

bool throws_config_error(const ordered_json& j, const std::string& needle) {
  try {
    (void)RunConfig::from_json(j);
  } catch (const ConfigError& e) {
    return std::string(e.what()).find(needle) != std::string::npos;
  }
  return false;
}

}  // namespace

TEST_CASE("an empty config resolves to the device defaults") {
  const RunConfig cfg = RunConfig::from_json(ordered_json::object());
  CHECK(cfg.system.chi_a_mhz == 6.5);
  CHECK(cfg.system.chi_b_mhz == 5.9);
  CHECK(cfg.system.kappa_mhz == 1.7);
  CHECK(cfg.system.tphi_a_us == doctest::Approx(32.0 / 3.0));
  CHECK(cfg.system.tphi_b_us == doctest::Approx(36.0));
  CHECK(cfg.system.cavity_levels == 15);
  CHECK(cfg.drives.nbar == 3.0);
  CHECK(cfg.drives.omega0_mhz == doctest::Approx(0.85));
  CHECK(cfg.drives.n_repump == 3);
  CHECK(cfg.t_final_us == 10.0);
  CHECK(cfg.tomo.shots == 500000);
  CHECK(cfg.seed == 1);
  CHECK(cfg.workers == 1);
}

TEST_CASE("unknown keys are rejected at every level") {
  CHECK(throws_config_error({{"bogus", 1}}, "config"));
  CHECK(throws_config_error({{"system", {{"chi_A_Mhz", 6.5}}}}, "system"));
  CHECK(throws_config_error({{"drives", {{"omega_0_MHz", 0.8}}}}, "drives"));
  CHECK(throws_config_error({{"solver", {{"tfinal", 1.0}}}}, "solver"));
  CHECK(throws_config_error({{"readout_m1", {{"muGG", 2.0}}}}, "readout_m1"));
  CHECK(throws_config_error({{"readout_m2", {{"sigma", 1.0}}}}, "readout_m2"));
  CHECK(throws_config_error({{"tomography", {{"nshots", 10}}}}, "tomography"));
  CHECK(throws_config_error({{"convergence", {{"tmax", 6.0}}}}, "convergence"));
  CHECK(throws_config_error({{"sweep", {{"nbar_axis", {1, 2, 3}}}}}, "sweep"));
}

TEST_CASE("T2 is accepted as an alternative to Tphi") {
  RunConfig cfg = RunConfig::from_json({{"system", {{"T2_A_us", 8.0}}}});
  CHECK(cfg.system.tphi_a_us == doctest::Approx(32.0 / 3.0));
  cfg = RunConfig::from_json({{"system", {{"T1_B_us", 9.0}, {"T2_B_us", 12.0}}}});
  CHECK(cfg.system.tphi_b_us == doctest::Approx(36.0));

  CHECK(throws_config_error({{"system", {{"Tphi_A_us", 10.0}, {"T2_A_us", 8.0}}}},
                            "not both"));
  // T2 beyond the physical 2*T1 limit is a config error, not a crash
  CHECK(throws_config_error({{"system", {{"T1_A_us", 10.0}, {"T2_A_us", 25.0}}}},
                            "T2"));
}

TEST_CASE("infinite lifetimes parse from strings and nulls") {
  const RunConfig cfg = RunConfig::from_json(ordered_json::parse(
      R"({"system": {"T1_A_us": "inf", "Tphi_B_us": null}})"));
  CHECK(std::isinf(cfg.system.t1_a_us));
  CHECK(std::isinf(cfg.system.tphi_b_us));
  const ordered_json echo = cfg.to_json();
  CHECK(echo["system"]["T1_A_us"] == "inf");
  CHECK(echo["system"]["Tphi_B_us"] == "inf");
  CHECK(throws_config_error({{"system", {{"T1_A_us", "forever"}}}}, "inf"));
}

TEST_CASE("repump order defaults to the rounded photon number") {
  RunConfig cfg = RunConfig::from_json({{"drives", {{"nbar", 2.4}}}});
  CHECK(cfg.drives.n_repump == 2);
  cfg = RunConfig::from_json({{"drives", {{"nbar", 2.6}}}});
  CHECK(cfg.drives.n_repump == 3);
  cfg = RunConfig::from_json({{"drives", {{"nbar", 2.6}, {"n_repump", 5}}}});
  CHECK(cfg.drives.n_repump == 5);
  CHECK(throws_config_error({{"drives", {{"n_repump", 2.5}}}}, "integer"));
  CHECK(throws_config_error({{"system", {{"N_c", 7.5}}}}, "integer"));
}

TEST_CASE("invalid physics values become config errors") {
  CHECK(throws_config_error({{"system", {{"kappa_MHz", -1.0}}}}, "kappa"));
  CHECK(throws_config_error({{"system", {{"N_c", 1}}}}, "cavity"));
  CHECK(throws_config_error({{"drives", {{"nbar", -0.5}}}}, "nbar"));
  CHECK(throws_config_error({{"solver", {{"rtol", 0.0}}}}, "tolerances"));
  CHECK(throws_config_error({{"workers", 0}}, "workers"));
  CHECK(throws_config_error({{"readout_m1", {{"sigma_gg_ratio", -0.5}}}},
                            "sigma_gg_ratio"));
  CHECK(throws_config_error({{"convergence", {{"t_max_us", 2.0}, {"fit_t_min_us", 3.0}}}},
                            "fit_t_min_us"));
}

TEST_CASE("the resolved echo is a fixed point of the parser") {
  const RunConfig cfg = RunConfig::from_json(tiny_config());
  const ordered_json echo = cfg.to_json();
  const RunConfig cfg2 = RunConfig::from_json(echo);
  CHECK(cfg2.to_json().dump() == echo.dump());
  CHECK(echo["system"]["N_c"] == 4);
  CHECK(echo["solver"]["t_final_us"] == 0.3);
  // defaults are materialized in the echo
  CHECK(echo["drives"]["n_repump"] == 3);
  CHECK(echo["convergence"]["fit_t_min_us"] == 0.4);
}

TEST_CASE("cmd_steady writes a deterministic, schema-stamped record") {
  const RunConfig cfg = RunConfig::from_json(tiny_config());
  TempDir a, b;
  cmd_steady(cfg, a.path);
  cmd_steady(cfg, b.path);
  const std::string ja = slurp(a.path / "steady.json");
  CHECK(ja == slurp(b.path / "steady.json"));

  const ordered_json j = ordered_json::parse(ja);
  CHECK(j["schema_version"] == kSchemaVersion);
  CHECK(j["command"] == "steady");
  CHECK(j["config"]["system"]["N_c"] == 4);
  const auto& r = j["results"];
  CHECK(r["F"].get<double>() >= 0.0);
  CHECK(r["F"].get<double>() <= 1.0);
  CHECK(r["pauli_averages"]["II"].get<double>() == doctest::Approx(1.0));
  CHECK(r["solver_stats"]["steps_accepted"].get<long>() > 0);
  CHECK(r["zeno_parameter"].get<double>() == doctest::Approx(3.0));
  CHECK(r["stationarity_residual"].get<double>() >= 0.0);
}

TEST_CASE("a single-point sweep reproduces the steady fidelity") {
  ordered_json j = tiny_config();
  j["sweep"] = {{"nbar", {3.0, 3.0, 1}}, {"omegan", {0.85, 0.85, 1}}};
  const RunConfig cfg = RunConfig::from_json(j);
  TempDir d;
  cmd_steady(cfg, d.path);
  cmd_sweep(cfg, d.path);

  const double f_steady =
      ordered_json::parse(slurp(d.path / "steady.json"))["results"]["F"].get<double>();
  const std::string csv = slurp(d.path / "sweep.csv");
  std::istringstream is(csv);
  std::string line, data;
  while (std::getline(is, line))
    if (!line.empty() && line[0] != '#' && line.find("nbar") != 0) data = line;
  REQUIRE(!data.empty());
  std::istringstream row(data);
  std::string nbar_s, omegan_s, omega0_s, f_s, status;
  std::getline(row, nbar_s, ',');
  std::getline(row, omegan_s, ',');
  std::getline(row, omega0_s, ',');
  std::getline(row, f_s, ',');
  std::getline(row, status, ',');
  CHECK(status == "ok");
  CHECK(std::stod(f_s) == doctest::Approx(f_steady).epsilon(1e-9));
}

TEST_CASE("sweep output does not depend on the worker count") {
  ordered_json j = tiny_config();
  j["sweep"] = {{"nbar", {1.0, 3.0, 2}}, {"omegan", {0.6, 1.0, 2}}};
  RunConfig cfg = RunConfig::from_json(j);
  TempDir a, b;
  cmd_sweep(cfg, a.path);
  cfg.workers = 3;
  cmd_sweep(cfg, b.path);
  const std::string sa = slurp(a.path / "sweep.csv");
  const std::string sb = slurp(b.path / "sweep.csv");
  // workers appear in the echoed config line; the data must match exactly
  std::string da = sa.substr(sa.find("nbar,"));
  std::string db = sb.substr(sb.find("nbar,"));
  CHECK(da == db);
  CHECK(std::count(da.begin(), da.end(), '\n') == 5);  // header + 4 points
}

TEST_CASE("cmd_convergence writes samples and the trimmed fit") {
  ordered_json j = tiny_config();
  j["convergence"] = {{"t_max_us", 1.0}, {"t_step_us", 0.25}, {"fit_t_min_us", 0.25}};
  const RunConfig cfg = RunConfig::from_json(j);
  TempDir d;
  cmd_convergence(cfg, d.path);
  const std::string csv = slurp(d.path / "convergence.csv");
  CHECK(csv.find("# fit: F_inf=") != std::string::npos);
  CHECK(csv.find("t_min_us=0.25") != std::string::npos);
  CHECK(csv.find("T_us,F") != std::string::npos);

  std::istringstream is(csv);
  std::string line;
  std::vector<double> times;
  bool in_data = false;
  while (std::getline(is, line)) {
    if (line.find("T_us,F") == 0) {
      in_data = true;
      continue;
    }
    if (in_data && !line.empty()) times.push_back(std::stod(line));
  }
  REQUIRE(times.size() == 5);
  for (size_t k = 1; k < times.size(); ++k) CHECK(times[k] > times[k - 1]);
  CHECK(times.back() == doctest::Approx(1.0));
}

TEST_CASE("cmd_budget writes the five labelled rows") {
  const RunConfig cfg = RunConfig::from_json(tiny_config());
  TempDir d;
  cmd_budget(cfg, d.path);
  const std::string csv = slurp(d.path / "budget.csv");
  const std::vector<std::string> labels = {"ideal", "chi_mismatch", "relaxation",
                                           "dephasing", "full"};
  size_t pos = csv.find("label,F,delta");
  REQUIRE(pos != std::string::npos);
  for (const auto& lbl : labels) {
    pos = csv.find("\n" + lbl + ",", pos);
    REQUIRE(pos != std::string::npos);
  }
}

TEST_CASE("cmd_postselect reports the conditioning summary") {
  const RunConfig cfg = RunConfig::from_json(tiny_config());
  TempDir d;
  cmd_postselect(cfg, d.path);
  const ordered_json j = ordered_json::parse(slurp(d.path / "postselect.json"));
  const auto& r = j["results"];
  CHECK(r["F_unconditioned"].get<double>() >= 0.0);
  CHECK(r["F_conditioned"].get<double>() >= 0.0);
  CHECK(r["kept_fraction"].get<double>() > 0.0);
  CHECK(r["kept_fraction"].get<double>() <= 1.0);
  CHECK(r.contains("usable"));
  CHECK(r["concurrence_conditioned"].get<double>() >= 0.0);
}

TEST_CASE("cmd_tomo exact mode round trips; shot mode is seed-deterministic") {
  ordered_json j = tiny_config();
  j["tomography"] = {{"exact", true}};
  const RunConfig exact_cfg = RunConfig::from_json(j);
  TempDir d;
  cmd_tomo(exact_cfg, d.path);
  const ordered_json out = ordered_json::parse(slurp(d.path / "tomo.json"));
  const auto& r = out["results"];
  CHECK(r["F_exact"].get<double>() ==
        doctest::Approx(r["F_tomo"].get<double>()).epsilon(1e-9));
  CHECK(r["design_condition_number"].get<double>() < 20.0);
  CHECK(r["outcomes"].size() == 16);
  CHECK(r["pauli_averages"]["II"].get<double>() == 1.0);

  j["tomography"] = {{"shots", 20000}};
  RunConfig shot_cfg = RunConfig::from_json(j);
  TempDir a, b, c;
  cmd_tomo(shot_cfg, a.path);
  cmd_tomo(shot_cfg, b.path);
  CHECK(slurp(a.path / "tomo.json") == slurp(b.path / "tomo.json"));
  shot_cfg.seed = 99;
  cmd_tomo(shot_cfg, c.path);
  CHECK(slurp(a.path / "tomo.json") != slurp(c.path / "tomo.json"));
}

TEST_CASE("the command line maps failures to the documented exit codes") {
  const std::string exe = BELLSIM_PATH;
  TempDir d;
  const fs::path good = d.path / "good.json";
  const fs::path bad = d.path / "bad.json";
  std::ofstream(good) << tiny_config().dump();
  std::ofstream(bad) << R"({"system": {"chi_A_Mhz": 6.5}})";

  auto run = [&](const std::string& args) {
    const std::string cmd = exe + " " + args + " >/dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
  };

  CHECK(run("steady --config " + good.string() + " --out " + (d.path / "o1").string()) == 0);
  CHECK(run("steady --config " + bad.string() + " --out " + (d.path / "o2").string()) == 2);
  CHECK(run("steady --config " + (d.path / "missing.json").string()) == 2);
  CHECK(run("") == 2);               // a subcommand is required
  CHECK(run("--help") == 0);
  CHECK(fs::exists(d.path / "o1" / "steady.json"));
}

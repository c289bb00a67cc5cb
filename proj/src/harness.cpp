#include "bellstab/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>
#include <vector>

namespace bellstab {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string fmt9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

void check_keys(const json& j, const std::string& where,
                const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : j.items())
    if (!allowed.count(key))
      throw ConfigError(where + ": unknown key \"" + key + "\"");
}

double num_at(const json& j, const std::string& where, const std::string& key,
              double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number())
    throw ConfigError(where + "." + key + ": expected a number");
  return j.at(key).get<double>();
}

// Accepts a number, the string "inf", or null (= infinite).
double time_or_inf(const json& j, const std::string& where, const std::string& key,
                   double fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (v.is_null()) return kInfinite;
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return kInfinite;
    throw ConfigError(where + "." + key + ": only \"inf\" is accepted as a string");
  }
  if (!v.is_number()) throw ConfigError(where + "." + key + ": expected number or \"inf\"");
  return v.get<double>();
}

json time_json(double v) {
  if (std::isinf(v)) return json("inf");
  return json(v);
}

SweepAxis axis_at(const json& j, const std::string& where, const std::string& key,
                  const SweepAxis& fallback) {
  if (!j.contains(key)) return fallback;
  const auto& v = j.at(key);
  if (!v.is_array() || v.size() != 3)
    throw ConfigError(where + "." + key + ": expected [min, max, points]");
  SweepAxis ax;
  ax.min = v[0].get<double>();
  ax.max = v[1].get<double>();
  ax.points = v[2].get<int>();
  if (ax.points < 1) throw ConfigError(where + "." + key + ": points must be >= 1");
  return ax;
}

ReadoutModel readout_at(const json& j, const std::string& where, ReadoutModel base) {
  check_keys(j, where,
             {"mu_gg_sigma", "mu_not_sigma", "sigma_gg_ratio", "threshold_sigma",
              "eps_gg", "eps_not"});
  base.mu_gg = num_at(j, where, "mu_gg_sigma", base.mu_gg);
  base.mu_not = num_at(j, where, "mu_not_sigma", base.mu_not);
  base.sigma_gg_ratio = num_at(j, where, "sigma_gg_ratio", base.sigma_gg_ratio);
  base.threshold = num_at(j, where, "threshold_sigma", base.threshold);
  base.eps_gg = num_at(j, where, "eps_gg", base.eps_gg);
  base.eps_not = num_at(j, where, "eps_not", base.eps_not);
  if (base.sigma_gg_ratio <= 0) throw ConfigError(where + ": sigma_gg_ratio must be > 0");
  if (base.eps_gg < 0 || base.eps_gg > 1 || base.eps_not < 0 || base.eps_not > 1)
    throw ConfigError(where + ": flip rates must lie in [0,1]");
  return base;
}

json readout_json(const ReadoutModel& m) {
  json j;
  j["mu_gg_sigma"] = m.mu_gg;
  j["mu_not_sigma"] = m.mu_not;
  j["sigma_gg_ratio"] = m.sigma_gg_ratio;
  j["threshold_sigma"] = m.threshold;
  j["eps_gg"] = m.eps_gg;
  j["eps_not"] = m.eps_not;
  return j;
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + p.string());
  out << content;
}

std::string csv_escape(std::string s) {
  for (auto& c : s)
    if (c == ',' || c == '\n') c = ';';
  return s;
}

json results_header(const RunConfig& cfg, const char* command) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["command"] = command;
  j["config"] = cfg.to_json();
  return j;
}

std::string csv_preamble(const RunConfig& cfg) {
  std::ostringstream os;
  os << "# schema_version: " << kSchemaVersion << "\n";
  os << "# config: " << cfg.to_json().dump() << "\n";
  return os.str();
}

// Drives-off copy used for the optional pre-tomography decay segment.
StabilizerModel decay_model(const RunConfig& cfg) {
  DriveParams off = cfg.drives;
  off.nbar = 0.0;
  off.omega0_mhz = 0.0;
  off.omegan_mhz = 0.0;
  return StabilizerModel(cfg.system, off);
}

Matrix reduced_state_for_tomo(const RunConfig& cfg, const StabilizerModel& model,
                              const Matrix& rho_steady) {
  Matrix rho = rho_steady;
  if (cfg.tomo.decay_us > 0) {
    StabilizerModel off = decay_model(cfg);
    SolverOptions o = cfg.solver;
    o.snapshot_times.clear();
    rho = evolve(rho, cfg.tomo.decay_us, off, o).final().rho;
  }
  return partial_trace_cavity(rho, model.space());
}

}  // namespace

RunConfig RunConfig::from_json(const json& j) {
  check_keys(j, "config",
             {"system", "drives", "solver", "readout_m1", "readout_m2", "tomography",
              "convergence", "sweep", "seed", "workers"});
  RunConfig cfg;

  if (j.contains("system")) {
    const auto& s = j.at("system");
    check_keys(s, "system",
               {"chi_A_MHz", "chi_B_MHz", "kappa_MHz", "T1_A_us", "T1_B_us",
                "Tphi_A_us", "Tphi_B_us", "T2_A_us", "T2_B_us", "N_c", "p_e_A",
                "p_e_B"});
    auto& p = cfg.system;
    p.chi_a_mhz = num_at(s, "system", "chi_A_MHz", p.chi_a_mhz);
    p.chi_b_mhz = num_at(s, "system", "chi_B_MHz", p.chi_b_mhz);
    p.kappa_mhz = num_at(s, "system", "kappa_MHz", p.kappa_mhz);
    p.t1_a_us = time_or_inf(s, "system", "T1_A_us", p.t1_a_us);
    p.t1_b_us = time_or_inf(s, "system", "T1_B_us", p.t1_b_us);
    if (s.contains("Tphi_A_us") && s.contains("T2_A_us"))
      throw ConfigError("system: give Tphi_A_us or T2_A_us, not both");
    if (s.contains("Tphi_B_us") && s.contains("T2_B_us"))
      throw ConfigError("system: give Tphi_B_us or T2_B_us, not both");
    p.tphi_a_us = time_or_inf(s, "system", "Tphi_A_us", p.tphi_a_us);
    p.tphi_b_us = time_or_inf(s, "system", "Tphi_B_us", p.tphi_b_us);
    try {
      if (s.contains("T2_A_us"))
        p.tphi_a_us = tphi_from_t1_t2(p.t1_a_us, time_or_inf(s, "system", "T2_A_us", 0));
      if (s.contains("T2_B_us"))
        p.tphi_b_us = tphi_from_t1_t2(p.t1_b_us, time_or_inf(s, "system", "T2_B_us", 0));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("system: ") + e.what());
    }
    if (s.contains("N_c")) {
      if (!s.at("N_c").is_number_integer())
        throw ConfigError("system.N_c: expected an integer");
      p.cavity_levels = s.at("N_c").get<int>();
    }
    p.p_excited_a = num_at(s, "system", "p_e_A", p.p_excited_a);
    p.p_excited_b = num_at(s, "system", "p_e_B", p.p_excited_b);
  }

  cfg.drives = DriveParams::nominal(cfg.system.kappa_mhz);
  if (j.contains("drives")) {
    const auto& d = j.at("drives");
    check_keys(d, "drives",
               {"nbar", "omega0_MHz", "omegan_MHz", "n_repump", "phase_n_rad",
                "phase_0_rad"});
    auto& p = cfg.drives;
    p.nbar = num_at(d, "drives", "nbar", p.nbar);
    p.omega0_mhz = num_at(d, "drives", "omega0_MHz", p.omega0_mhz);
    p.omegan_mhz = num_at(d, "drives", "omegan_MHz", p.omegan_mhz);
    p.n_repump = int(std::lround(p.nbar));
    if (d.contains("n_repump")) {
      if (!d.at("n_repump").is_number_integer())
        throw ConfigError("drives.n_repump: expected an integer");
      p.n_repump = d.at("n_repump").get<int>();
    }
    p.phase_n = num_at(d, "drives", "phase_n_rad", p.phase_n);
    p.phase_0 = num_at(d, "drives", "phase_0_rad", p.phase_0);
  }

  if (j.contains("solver")) {
    const auto& s = j.at("solver");
    check_keys(s, "solver", {"t_final_us", "rtol", "atol", "h_init_us", "h_max_us"});
    cfg.t_final_us = num_at(s, "solver", "t_final_us", cfg.t_final_us);
    cfg.solver.rtol = num_at(s, "solver", "rtol", cfg.solver.rtol);
    cfg.solver.atol = num_at(s, "solver", "atol", cfg.solver.atol);
    cfg.solver.h_init_us = num_at(s, "solver", "h_init_us", cfg.solver.h_init_us);
    cfg.solver.h_max_us = num_at(s, "solver", "h_max_us", cfg.solver.h_max_us);
    if (cfg.solver.rtol <= 0 || cfg.solver.atol <= 0)
      throw ConfigError("solver: tolerances must be positive");
    if (cfg.t_final_us <= 0) throw ConfigError("solver.t_final_us must be positive");
  }

  if (j.contains("readout_m1"))
    cfg.readout_m1 = readout_at(j.at("readout_m1"), "readout_m1", cfg.readout_m1);
  if (j.contains("readout_m2"))
    cfg.readout_m2 = readout_at(j.at("readout_m2"), "readout_m2", cfg.readout_m2);

  if (j.contains("tomography")) {
    const auto& t = j.at("tomography");
    check_keys(t, "tomography", {"shots", "decay_us", "exact"});
    if (t.contains("shots")) cfg.tomo.shots = t.at("shots").get<long>();
    cfg.tomo.decay_us = num_at(t, "tomography", "decay_us", cfg.tomo.decay_us);
    if (t.contains("exact")) cfg.tomo.exact = t.at("exact").get<bool>();
    if (cfg.tomo.shots <= 0) throw ConfigError("tomography.shots must be positive");
    if (cfg.tomo.decay_us < 0) throw ConfigError("tomography.decay_us must be >= 0");
  }

  if (j.contains("convergence")) {
    const auto& c = j.at("convergence");
    check_keys(c, "convergence", {"t_max_us", "t_step_us", "fit_t_min_us"});
    cfg.convergence.t_max_us = num_at(c, "convergence", "t_max_us", cfg.convergence.t_max_us);
    cfg.convergence.t_step_us =
        num_at(c, "convergence", "t_step_us", cfg.convergence.t_step_us);
    cfg.convergence.fit_t_min_us =
        num_at(c, "convergence", "fit_t_min_us", cfg.convergence.fit_t_min_us);
    if (cfg.convergence.t_step_us <= 0 || cfg.convergence.t_max_us <= 0)
      throw ConfigError("convergence: times must be positive");
    if (cfg.convergence.fit_t_min_us < 0 ||
        cfg.convergence.fit_t_min_us > cfg.convergence.t_max_us)
      throw ConfigError("convergence: fit_t_min_us outside [0, t_max_us]");
  }

  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    check_keys(s, "sweep", {"nbar", "omegan", "omega0"});
    cfg.sweep.nbar = axis_at(s, "sweep", "nbar", cfg.sweep.nbar);
    cfg.sweep.omegan = axis_at(s, "sweep", "omegan", cfg.sweep.omegan);
    if (s.contains("omega0"))
      cfg.sweep.omega0 = axis_at(s, "sweep", "omega0", SweepAxis{});
  }

  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("workers")) {
    cfg.workers = j.at("workers").get<int>();
    if (cfg.workers < 1) throw ConfigError("workers must be >= 1");
  }

  try {
    cfg.system.validate();
    cfg.drives.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

RunConfig RunConfig::from_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw ConfigError("cannot open config file " + p.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config parse error in " + p.string() + ": " + e.what());
  }
  return from_json(j);
}

json RunConfig::to_json() const {
  json j;
  json sys;
  sys["chi_A_MHz"] = system.chi_a_mhz;
  sys["chi_B_MHz"] = system.chi_b_mhz;
  sys["kappa_MHz"] = system.kappa_mhz;
  sys["T1_A_us"] = time_json(system.t1_a_us);
  sys["T1_B_us"] = time_json(system.t1_b_us);
  sys["Tphi_A_us"] = time_json(system.tphi_a_us);
  sys["Tphi_B_us"] = time_json(system.tphi_b_us);
  sys["N_c"] = system.cavity_levels;
  sys["p_e_A"] = system.p_excited_a;
  sys["p_e_B"] = system.p_excited_b;
  j["system"] = sys;

  json d;
  d["nbar"] = drives.nbar;
  d["omega0_MHz"] = drives.omega0_mhz;
  d["omegan_MHz"] = drives.omegan_mhz;
  d["n_repump"] = drives.n_repump;
  d["phase_n_rad"] = drives.phase_n;
  d["phase_0_rad"] = drives.phase_0;
  j["drives"] = d;

  json s;
  s["t_final_us"] = t_final_us;
  s["rtol"] = solver.rtol;
  s["atol"] = solver.atol;
  s["h_init_us"] = solver.h_init_us;
  s["h_max_us"] = solver.h_max_us;
  j["solver"] = s;

  j["readout_m1"] = readout_json(readout_m1);
  j["readout_m2"] = readout_json(readout_m2);

  json t;
  t["shots"] = tomo.shots;
  t["decay_us"] = tomo.decay_us;
  t["exact"] = tomo.exact;
  j["tomography"] = t;

  json c;
  c["t_max_us"] = convergence.t_max_us;
  c["t_step_us"] = convergence.t_step_us;
  c["fit_t_min_us"] = convergence.fit_t_min_us;
  j["convergence"] = c;

  json sw;
  sw["nbar"] = {sweep.nbar.min, sweep.nbar.max, sweep.nbar.points};
  sw["omegan"] = {sweep.omegan.min, sweep.omegan.max, sweep.omegan.points};
  if (sweep.omega0)
    sw["omega0"] = {sweep.omega0->min, sweep.omega0->max, sweep.omega0->points};
  j["sweep"] = sw;

  j["seed"] = seed;
  j["workers"] = workers;
  return j;
}

void cmd_steady(const RunConfig& cfg, const fs::path& out_dir) {
  const auto t0 = std::chrono::steady_clock::now();
  StabilizerModel model(cfg.system, cfg.drives);
  const SteadyResult res = steady_state(model, cfg.t_final_us, cfg.solver);
  const Matrix rho2q = partial_trace_cavity(res.state.rho, model.space());
  const PauliVector pv = pauli_averages(rho2q);
  const BasisWeights bw = basis_weights(rho2q);
  const double fid = fidelity(res.state.rho, model.space());
  const Matrix a = embed(annihilation(model.space().cavity_levels), Subsystem::Cavity,
                         model.space());
  const double photons = expectation(res.state.rho, Matrix(a.adjoint() * a)).real();
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  json j = results_header(cfg, "steady");
  json r;
  r["F"] = fid;
  r["concurrence"] = concurrence(rho2q);
  json w;
  w["gg"] = bw.gg;
  w["ee"] = bw.ee;
  w["phi_plus"] = bw.phi_plus;
  w["phi_minus"] = bw.phi_minus;
  r["basis_weights"] = w;
  json paulis;
  for (int k = 0; k < 16; ++k) paulis[PauliVector::label(k)] = pv.values[size_t(k)];
  r["pauli_averages"] = paulis;
  r["photon_number"] = photons;
  r["zeno_parameter"] = zeno_parameter(cfg.system, cfg.drives);
  r["stationarity_residual"] = res.stationarity_residual;
  json st;
  st["steps_accepted"] = res.stats.accepted;
  st["steps_rejected"] = res.stats.rejected;
  st["rhs_evals"] = res.stats.rhs_evals;
  r["solver_stats"] = st;
  j["results"] = r;

  fs::create_directories(out_dir);
  write_file(out_dir / "steady.json", j.dump(2) + "\n");
  std::printf("steady: F=%.4f C=%.4f residual=%.3g\n", fid, r["concurrence"].get<double>(),
              res.stationarity_residual);
  std::fprintf(stderr, "steady: wall time %.2f s\n", wall);
}

void cmd_convergence(const RunConfig& cfg, const fs::path& out_dir) {
  StabilizerModel model(cfg.system, cfg.drives);
  std::vector<double> ts;
  for (double t = 0.0; t <= cfg.convergence.t_max_us + 1e-9; t += cfg.convergence.t_step_us)
    ts.push_back(std::min(t, cfg.convergence.t_max_us));
  SolverOptions o = cfg.solver;
  o.snapshot_times = ts;

  const Trajectory traj = evolve(model.initial_state(), cfg.convergence.t_max_us, model, o);
  std::vector<double> t_out, f_out, t_fit, f_fit;
  for (const auto& s : traj.snapshots) {
    t_out.push_back(s.time_us);
    f_out.push_back(fidelity(s.rho, model.space()));
    if (s.time_us >= cfg.convergence.fit_t_min_us - 1e-9) {
      t_fit.push_back(s.time_us);
      f_fit.push_back(f_out.back());
    }
  }
  const ExponentialFit fit = fit_exponential(t_fit, f_fit);

  std::ostringstream os;
  os << csv_preamble(cfg);
  os << "# fit: F_inf=" << fmt9(fit.f_inf) << " F_0=" << fmt9(fit.f_0)
     << " tau_us=" << fmt9(fit.tau_us) << " rms=" << fmt9(fit.rms_residual)
     << " t_min_us=" << fmt9(cfg.convergence.fit_t_min_us) << "\n";
  os << "T_us,F\n";
  for (size_t i = 0; i < t_out.size(); ++i)
    os << fmt9(t_out[i]) << "," << fmt9(f_out[i]) << "\n";

  fs::create_directories(out_dir);
  write_file(out_dir / "convergence.csv", os.str());
  std::printf("convergence: F_inf=%.4f tau=%.3f us over %zu points\n", fit.f_inf,
              fit.tau_us, t_out.size());
}

void cmd_sweep(const RunConfig& cfg, const fs::path& out_dir) {
  const SweepAxis ax_n = cfg.sweep.nbar;
  const SweepAxis ax_wn = cfg.sweep.omegan;
  const SweepAxis ax_w0 = cfg.sweep.omega0.value_or(
      SweepAxis{cfg.drives.omega0_mhz, cfg.drives.omega0_mhz, 1});

  struct Point {
    double nbar = 0, omegan = 0, omega0 = 0;
    double fid = std::numeric_limits<double>::quiet_NaN();
    std::string error;
  };
  std::vector<Point> grid;
  for (int i = 0; i < ax_n.points; ++i)
    for (int k = 0; k < ax_w0.points; ++k)
      for (int jj = 0; jj < ax_wn.points; ++jj) {
        Point p;
        p.nbar = ax_n.at(i);
        p.omegan = ax_wn.at(jj);
        p.omega0 = ax_w0.at(k);
        grid.push_back(std::move(p));
      }

  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
      DriveParams d = cfg.drives;  // n_repump and phases stay fixed across the grid
      d.nbar = grid[i].nbar;
      d.omegan_mhz = grid[i].omegan;
      d.omega0_mhz = grid[i].omega0;
      try {
        StabilizerModel m(cfg.system, d);
        grid[i].fid = fidelity(steady_state(m, cfg.t_final_us, cfg.solver).state.rho,
                               m.space());
      } catch (const std::exception& e) {
        grid[i].error = e.what();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(cfg.workers, int(grid.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  std::ostringstream os;
  os << csv_preamble(cfg);
  os << "nbar,omegan_MHz,omega0_MHz,F,status\n";
  for (const auto& p : grid) {
    os << fmt9(p.nbar) << "," << fmt9(p.omegan) << "," << fmt9(p.omega0) << ",";
    if (p.error.empty())
      os << fmt9(p.fid) << ",ok\n";
    else
      os << "nan,failed:" << csv_escape(p.error) << "\n";
  }
  fs::create_directories(out_dir);
  write_file(out_dir / "sweep.csv", os.str());

  double best = -1, bn = 0, bw = 0;
  for (const auto& p : grid)
    if (p.error.empty() && p.fid > best) {
      best = p.fid;
      bn = p.nbar;
      bw = p.omegan;
    }
  std::printf("sweep: %zu points, best F=%.4f at nbar=%.3g omegan=%.3g MHz\n",
              grid.size(), best, bn, bw);
}

void cmd_budget(const RunConfig& cfg, const fs::path& out_dir) {
  const ErrorBudget budget =
      error_budget(cfg.system, cfg.drives, cfg.t_final_us, cfg.solver, cfg.workers);
  std::ostringstream os;
  os << csv_preamble(cfg);
  os << "label,F,delta\n";
  for (const auto& e : budget.entries)
    os << e.label << "," << fmt9(e.fidelity) << "," << fmt9(e.delta) << "\n";
  fs::create_directories(out_dir);
  write_file(out_dir / "budget.csv", os.str());
  std::printf("budget: ideal F=%.4f full F=%.4f\n", budget.entries.front().fidelity,
              budget.entries.back().fidelity);
}

void cmd_postselect(const RunConfig& cfg, const fs::path& out_dir) {
  StabilizerModel model(cfg.system, cfg.drives);
  const SteadyResult res = steady_state(model, cfg.t_final_us, cfg.solver);
  const double f_raw = fidelity(res.state.rho, model.space());
  const ConditionResult cond = condition_on_m1(res.state.rho, model.space(),
                                               cfg.readout_m1, cfg.readout_m1.threshold);
  const Matrix rho2q_cond = partial_trace_cavity(cond.rho_cond, model.space());

  json j = results_header(cfg, "postselect");
  json r;
  r["F_unconditioned"] = f_raw;
  r["F_conditioned"] = fidelity(cond.rho_cond, model.space());
  r["kept_fraction"] = cond.kept_fraction;
  r["usable"] = cond.usable;
  r["concurrence_conditioned"] = concurrence(rho2q_cond);
  j["results"] = r;

  fs::create_directories(out_dir);
  write_file(out_dir / "postselect.json", j.dump(2) + "\n");
  std::printf("postselect: F %.4f -> %.4f keeping %.3g of shots\n", f_raw,
              r["F_conditioned"].get<double>(), cond.kept_fraction);
}

void cmd_tomo(const RunConfig& cfg, const fs::path& out_dir) {
  StabilizerModel model(cfg.system, cfg.drives);
  const SteadyResult res = steady_state(model, cfg.t_final_us, cfg.solver);
  const Matrix rho2q = reduced_state_for_tomo(cfg, model, res.state.rho);

  const RotationSet rots = RotationSet::standard();
  const DesignMatrix design = build_design_matrix(rots);
  const auto outcomes =
      cfg.tomo.exact
          ? simulate_tomography(rho2q, rots)
          : simulate_tomography(rho2q, rots, cfg.readout_m2, cfg.tomo.shots, cfg.seed);
  const PauliVector pv = reconstruct(outcomes, design);
  const double f_tomo = (1.0 - pv(1, 1) - pv(2, 2) - pv(3, 3)) / 4.0;

  json j = results_header(cfg, "tomo");
  json r;
  r["F_exact"] = fidelity_two_qubit(rho2q);
  r["F_tomo"] = f_tomo;
  r["design_condition_number"] = design.condition_number;
  json outs = json::array();
  for (double v : outcomes) outs.push_back(v);
  r["outcomes"] = outs;
  json paulis;
  for (int k = 0; k < 16; ++k) paulis[PauliVector::label(k)] = pv.values[size_t(k)];
  r["pauli_averages"] = paulis;
  j["results"] = r;

  fs::create_directories(out_dir);
  write_file(out_dir / "tomo.json", j.dump(2) + "\n");
  std::printf("tomo: F_exact=%.4f F_tomo=%.4f (cond %.3g)\n",
              r["F_exact"].get<double>(), f_tomo, design.condition_number);
}

}  // namespace bellstab

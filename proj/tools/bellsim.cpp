// Command-line front end for the stabilization simulator.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 solver failure.

#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>

#include <CLI11.hpp>

#include "bellstab/harness.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  double tol = 0;
  int workers = 0;
  bool seed_set = false, tol_set = false, workers_set = false;
};

void add_common(CLI::App* sc, CommonFlags& f) {
  sc->add_option("--config", f.config_path, "JSON configuration file")->required();
  sc->add_option("--out", f.out_dir, "output directory (default: current)");
  sc->add_option("--seed", f.seed, "override the configured RNG seed")
      ->each([&](const std::string&) { f.seed_set = true; });
  sc->add_option("--tol", f.tol, "override the solver relative tolerance")
      ->each([&](const std::string&) { f.tol_set = true; });
  sc->add_option("--workers", f.workers, "override the worker thread count")
      ->each([&](const std::string&) { f.workers_set = true; });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bellsim: autonomous Bell-state stabilization simulator"};
  app.require_subcommand(1);

  CommonFlags flags;
  using Cmd = std::function<void(const bellstab::RunConfig&, const std::filesystem::path&)>;
  struct Sub {
    const char* name;
    const char* help;
    Cmd run;
  };
  const Sub subs[] = {
      {"steady", "steady-state fidelity and two-qubit observables", bellstab::cmd_steady},
      {"convergence", "fidelity vs stabilization time with exponential fit",
       bellstab::cmd_convergence},
      {"sweep", "steady-state fidelity over a drive-parameter grid", bellstab::cmd_sweep},
      {"budget", "error budget across model configurations", bellstab::cmd_budget},
      {"postselect", "post-selected fidelity after a parity pre-measurement",
       bellstab::cmd_postselect},
      {"tomo", "simulated two-qubit tomography of the stabilized state",
       bellstab::cmd_tomo},
  };
  for (const auto& s : subs) add_common(app.add_subcommand(s.name, s.help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    bellstab::RunConfig cfg = bellstab::RunConfig::from_file(flags.config_path);
    if (flags.seed_set) cfg.seed = flags.seed;
    if (flags.tol_set) {
      if (flags.tol <= 0) throw bellstab::ConfigError("--tol must be positive");
      cfg.solver.rtol = flags.tol;
    }
    if (flags.workers_set) {
      if (flags.workers < 1) throw bellstab::ConfigError("--workers must be >= 1");
      cfg.workers = flags.workers;
    }
    for (const auto& s : subs)
      if (app.get_subcommand(s.name)->parsed()) s.run(cfg, flags.out_dir);
    return 0;
  } catch (const bellstab::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const bellstab::SolverError& e) {
    std::fprintf(stderr, "solver error: %s (local error %.3g)\n", e.what(), e.local_error);
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

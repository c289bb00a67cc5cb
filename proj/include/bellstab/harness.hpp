#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "bellstab/analysis.hpp"
#include "bellstab/model.hpp"
#include "bellstab/readout.hpp"
#include "bellstab/solver.hpp"
#include "bellstab/tomography.hpp"

namespace bellstab {

inline constexpr int kSchemaVersion = 1;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TomoSettings {
  long shots = 500000;   // per rotation setting
  double decay_us = 0.0; // optional drives-off segment before tomography
  bool exact = false;
};

struct ConvergenceSettings {
  double t_max_us = 6.0;
  double t_step_us = 0.2;
  // Samples before this time are excluded from the exponential fit: the loop
  // spends the first few hundred ns loading the cavity, and that lag phase is
  // not part of the asymptotic approach.
  double fit_t_min_us = 0.4;
};

struct SweepAxis {
  double min = 0, max = 0;
  int points = 1;
  double at(int i) const {
    return points < 2 ? min : min + (max - min) * double(i) / double(points - 1);
  }
};

struct SweepSettings {
  SweepAxis nbar{0.25, 6.0, 15};
  SweepAxis omegan{0.2, 1.7, 15};
  std::optional<SweepAxis> omega0;  // absent: hold at the configured value
};

// Everything a run needs; parsed strictly (unknown keys are errors).
struct RunConfig {
  SystemParams system = SystemParams::device();
  DriveParams drives = DriveParams::nominal(1.7);
  SolverOptions solver;
  double t_final_us = 10.0;
  ReadoutModel readout_m1 = ReadoutModel::conditioning();
  ReadoutModel readout_m2 = ReadoutModel::tomography();
  TomoSettings tomo;
  ConvergenceSettings convergence;
  SweepSettings sweep;
  std::uint64_t seed = 1;
  int workers = 1;

  static RunConfig from_json(const nlohmann::ordered_json& j);
  static RunConfig from_file(const std::filesystem::path& p);
  nlohmann::ordered_json to_json() const;  // resolved values, fixed key order
};

// Commands; each writes its output file(s) under out_dir and prints a short
// summary line to stdout.  Throws ConfigError / SolverError on failure.
void cmd_steady(const RunConfig& cfg, const std::filesystem::path& out_dir);
void cmd_convergence(const RunConfig& cfg, const std::filesystem::path& out_dir);
void cmd_sweep(const RunConfig& cfg, const std::filesystem::path& out_dir);
void cmd_budget(const RunConfig& cfg, const std::filesystem::path& out_dir);
void cmd_postselect(const RunConfig& cfg, const std::filesystem::path& out_dir);
void cmd_tomo(const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace bellstab

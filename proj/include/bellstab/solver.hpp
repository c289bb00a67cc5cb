#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "bellstab/model.hpp"

namespace bellstab {

struct DensityMatrix {
  Matrix rho;
  double time_us = 0.0;

  double trace_defect() const;     // |Tr(rho) - 1|
  double hermiticity() const;      // max |rho - rho^dag|
  double min_eigenvalue() const;   // smallest eigenvalue of (rho+rho^dag)/2
};

struct SolverOptions {
  double rtol = 1e-7;
  double atol = 1e-10;
  double h_init_us = 1e-3;
  double h_max_us = 0.02;
  std::vector<double> snapshot_times;  // ascending; t_end is always recorded
};

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  long rhs_evals = 0;
};

struct Snapshot {
  double time_us;
  Matrix rho;
};

struct Trajectory {
  std::vector<Snapshot> snapshots;
  StepStats stats;
  const Snapshot& final() const { return snapshots.back(); }
};

class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double t_us, double err)
      : std::runtime_error(what), time_us(t_us), local_error(err) {}
  double time_us;
  double local_error;
};

// drho/dt for a Hermitian rho: -i[H(t),rho] + sum_k rate_k D[L_k]rho.
Matrix lindblad_rhs(const Matrix& rho, double t_us, const StabilizerModel& model);

Trajectory evolve(const Matrix& rho0, double t_end_us, const StabilizerModel& model,
                  const SolverOptions& opts = {});

struct SteadyResult {
  DensityMatrix state;
  double stationarity_residual;  // Frobenius norm of rho(t_f) - rho(t_f - T_drive)
  StepStats stats;
};

SteadyResult steady_state(const StabilizerModel& model, double t_final_us = 10.0,
                          const SolverOptions& opts = {});

}  // namespace bellstab

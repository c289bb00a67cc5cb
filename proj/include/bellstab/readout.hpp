#pragma once

#include <cstdint>
#include <vector>

#include "bellstab/hilbert.hpp"

namespace bellstab {

// Phenomenological single-shot readout: the homodyne outcome is Gaussian with
// a state-dependent mean; "GG" (both qubits ground) transmits and lands high,
// everything else stays near zero.  Means and the threshold are quoted in
// units of the not-GG standard deviation; the GG distribution is narrower by
// sigma_gg_ratio.  Assignment-error rates act as label flips before sampling.
struct ReadoutModel {
  double mu_gg = 5.5;
  double mu_not = 0.0;
  double sigma_gg_ratio = 0.75;
  double threshold = 5.0;  // outcome >= threshold is read as GG
  double eps_gg = 0.0;     // P(gg mislabeled as not-gg) before sampling
  double eps_not = 0.0;

  double separation() const { return mu_gg - mu_not; }
  static ReadoutModel tomography();    // 5.5 sigma separation, 4%/3% flips
  static ReadoutModel conditioning();  // 2 sigma separation, 4%/3% flips
};

// P(outcome drawn for `true_gg` lands at or above `threshold`), flips included.
double assigned_gg_probability(const ReadoutModel& m, bool true_gg, double threshold);

struct AssignmentFidelity {
  double p_correct_gg;   // P(read GG | state gg)
  double p_correct_not;  // P(read not-GG | any other state)
};
AssignmentFidelity assignment_fidelity(const ReadoutModel& m);

// Draw homodyne outcomes for a 4x4 two-qubit state.  Deterministic per seed.
std::vector<double> sample_outcomes(const Matrix& rho2q, const ReadoutModel& m,
                                    long shots, std::uint64_t seed);

struct ConditionResult {
  Matrix rho_cond;       // full-space state, renormalized
  double kept_fraction;  // probability a shot passes the cut
  bool usable;           // kept_fraction above the floor
};

// Post-select on a first measurement reading not-GG (outcome < threshold).
// The state is dephased between the GG and not-GG sectors, each weighted by
// its keep probability; coherence inside the odd manifold survives.
ConditionResult condition_on_m1(const Matrix& rho_full, const HilbertSpace& space,
                                const ReadoutModel& m, double threshold,
                                double kept_floor = 1e-6);

struct Histogram {
  double bin_width = 0.0;
  double origin = 0.0;  // left edge of counts[0], aligned to a bin multiple
  std::vector<long> counts;
  long total = 0;
};
Histogram histogram(const std::vector<double>& samples, double bin_width);

}  // namespace bellstab

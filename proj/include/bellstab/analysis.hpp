#pragma once

#include <array>
#include <string>
#include <vector>

#include "bellstab/model.hpp"
#include "bellstab/solver.hpp"

namespace bellstab {

// <P ⊗ Q> for P,Q in {I,X,Y,Z}; flat index 4*p + q (first factor = qubit A).
struct PauliVector {
  std::array<double, 16> values{};

  static int index(int p, int q) { return 4 * p + q; }
  static std::string label(int flat);
  double operator()(int p, int q) const { return values[index(p, q)]; }
};

// Overlap with the odd-parity Bell target, Tr(rho * |phi-><phi-| ⊗ I_cavity).
double fidelity(const Matrix& rho_full, const HilbertSpace& space);

// Same, for an already-reduced 4x4 two-qubit state.
double fidelity_two_qubit(const Matrix& rho2q);

PauliVector pauli_averages(const Matrix& rho2q);

// Inverse of pauli_averages: rho = (1/4) sum_k <P_k> P_k.
Matrix density_from_pauli(const PauliVector& pv);

// Wootters concurrence of a 4x4 two-qubit state.
double concurrence(const Matrix& rho2q);

struct BasisWeights {
  double gg, ee, phi_plus, phi_minus;
};
BasisWeights basis_weights(const Matrix& rho2q);

// Least-squares fit of F(T) = f_inf - (f_inf - f_0) exp(-T/tau).
struct ExponentialFit {
  double f_inf, f_0, tau_us, rms_residual;
};
ExponentialFit fit_exponential(const std::vector<double>& t_us,
                               const std::vector<double>& f);

struct BudgetEntry {
  std::string label;
  double fidelity;
  double delta;  // fidelity_ideal - fidelity (0 for the ideal row)
};
struct ErrorBudget {
  std::vector<BudgetEntry> entries;
};

// Five-configuration decomposition: ideal (matched chi, no decoherence), then
// chi mismatch / relaxation / dephasing switched on individually, then all.
ErrorBudget error_budget(const SystemParams& sys, const DriveParams& drives,
                         double t_final_us = 10.0, const SolverOptions& opts = {},
                         int workers = 1);

}  // namespace bellstab

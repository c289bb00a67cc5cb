#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "bellstab/analysis.hpp"
#include "bellstab/readout.hpp"

namespace bellstab {

// Pre-measurement rotation set {Id, Rx(pi), Rx(pi/2), Ry(pi/2)} applied to
// each qubit; R_axis(theta) = exp(-i theta sigma_axis / 2).
struct RotationSet {
  std::array<Matrix, 4> u;
  static RotationSet standard();
};

// Row r = 4*i + j holds the Pauli decomposition of (Ui ⊗ Uj)^dag P_gg (Ui ⊗ Uj),
// so outcomes = design * pauli_vector.
struct DesignMatrix {
  Eigen::Matrix<double, 16, 16> m;
  double condition_number;
};
DesignMatrix build_design_matrix(const RotationSet& rots);

// Expected P(read gg) for each rotation pair, no noise.
std::array<double, 16> simulate_tomography(const Matrix& rho2q, const RotationSet& rots);

// Finite-shot simulation with the readout's assignment errors folded in.
// `shots` is the repetition count per rotation setting.
std::array<double, 16> simulate_tomography(const Matrix& rho2q, const RotationSet& rots,
                                           const ReadoutModel& readout, long shots,
                                           std::uint64_t seed);

// Linear inversion with <II> pinned to 1 (the II column of the design is
// constant, so the remaining 15 averages come from an overdetermined solve).
PauliVector reconstruct(const std::array<double, 16>& outcomes, const DesignMatrix& design);

// The 36 two-qubit product states of single-qubit Pauli eigenstates.
std::vector<Matrix> clifford_product_states();

// Prepare -> simulate -> reconstruct for each product state; returns the
// state fidelities <psi|rho_rec|psi>.  Exact readout when `readout` is null.
std::vector<double> clifford_suite(const RotationSet& rots, const ReadoutModel* readout,
                                   long shots, std::uint64_t seed);

}  // namespace bellstab

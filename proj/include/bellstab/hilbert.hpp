#pragma once

#include <complex>

#include <Eigen/Dense>

namespace bellstab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Composite space qubit A ⊗ qubit B ⊗ cavity with the cavity index fastest:
// basis index = (i_A*2 + i_B)*N_c + n.  Qubit index 0 is |g>, and the Z
// operator below is diag(+1,-1), so Z|g> = +|g>.
struct HilbertSpace {
  explicit HilbertSpace(int cavity_levels);

  int cavity_levels;

  int dim() const { return 4 * cavity_levels; }
  int index(int i_a, int i_b, int n) const;
  Vector basis_ket(int i_a, int i_b, int n) const;
};

enum class Subsystem { QubitA, QubitB, Cavity };

Matrix kron(const Matrix& a, const Matrix& b);

// Truncated ladder operator, a|n> = sqrt(n)|n-1>.  Requires n_levels >= 2.
Matrix annihilation(int n_levels);

// Lift a 2x2 (qubit) or N_c x N_c (cavity) operator to the full space.
Matrix embed(const Matrix& op, Subsystem where, const HilbertSpace& space);

// Lift a 4x4 two-qubit operator (identity on the cavity).
Matrix embed_qubit_pair(const Matrix& op4, const HilbertSpace& space);

Complex expectation(const Matrix& rho, const Matrix& op);

// Trace out the cavity, returning the 4x4 two-qubit state.
Matrix partial_trace_cavity(const Matrix& rho, const HilbertSpace& space);

// Single-qubit primitives in the (|g>, |e>) basis.
Matrix qubit_identity();
Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix qubit_raise();  // |e><g|
Matrix qubit_lower();  // |g><e|

// Two-qubit odd-parity Bell vectors, (|ge> -+ |eg>)/sqrt(2).
Vector bell_phi_minus();
Vector bell_phi_plus();

double hermiticity_defect(const Matrix& m);

}  // namespace bellstab

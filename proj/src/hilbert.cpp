#include "bellstab/hilbert.hpp"

#include <cmath>
#include <stdexcept>

namespace bellstab {

HilbertSpace::HilbertSpace(int n) : cavity_levels(n) {
  if (n < 2) throw std::invalid_argument("HilbertSpace: need at least 2 cavity levels");
}

int HilbertSpace::index(int i_a, int i_b, int n) const {
  if (i_a < 0 || i_a > 1 || i_b < 0 || i_b > 1 || n < 0 || n >= cavity_levels)
    throw std::invalid_argument("HilbertSpace::index: label out of range");
  return (i_a * 2 + i_b) * cavity_levels + n;
}

Vector HilbertSpace::basis_ket(int i_a, int i_b, int n) const {
  Vector v = Vector::Zero(dim());
  v(index(i_a, i_b, n)) = 1.0;
  return v;
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix annihilation(int n_levels) {
  if (n_levels < 2) throw std::invalid_argument("annihilation: need at least 2 levels");
  Matrix a = Matrix::Zero(n_levels, n_levels);
  for (int n = 1; n < n_levels; ++n) a(n - 1, n) = std::sqrt(double(n));
  return a;
}

Matrix embed(const Matrix& op, Subsystem where, const HilbertSpace& space) {
  const int nc = space.cavity_levels;
  const Matrix i2 = Matrix::Identity(2, 2);
  const Matrix ic = Matrix::Identity(nc, nc);
  switch (where) {
    case Subsystem::QubitA:
      if (op.rows() != 2 || op.cols() != 2)
        throw std::invalid_argument("embed: qubit operator must be 2x2");
      return kron(op, kron(i2, ic));
    case Subsystem::QubitB:
      if (op.rows() != 2 || op.cols() != 2)
        throw std::invalid_argument("embed: qubit operator must be 2x2");
      return kron(i2, kron(op, ic));
    case Subsystem::Cavity:
      if (op.rows() != nc || op.cols() != nc)
        throw std::invalid_argument("embed: cavity operator dimension mismatch");
      return kron(kron(i2, i2), op);
  }
  throw std::invalid_argument("embed: bad subsystem");
}

Matrix embed_qubit_pair(const Matrix& op4, const HilbertSpace& space) {
  if (op4.rows() != 4 || op4.cols() != 4)
    throw std::invalid_argument("embed_qubit_pair: operator must be 4x4");
  return kron(op4, Matrix::Identity(space.cavity_levels, space.cavity_levels));
}

Complex expectation(const Matrix& rho, const Matrix& op) {
  if (rho.rows() != op.rows() || rho.cols() != op.cols() || rho.rows() != rho.cols())
    throw std::invalid_argument("expectation: dimension mismatch");
  // Tr(rho*op) without forming the product.
  return (rho.array() * op.transpose().array()).sum();
}

Matrix partial_trace_cavity(const Matrix& rho, const HilbertSpace& space) {
  if (rho.rows() != space.dim() || rho.cols() != space.dim())
    throw std::invalid_argument("partial_trace_cavity: dimension mismatch");
  const int nc = space.cavity_levels;
  Matrix out = Matrix::Zero(4, 4);
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q)
      for (int n = 0; n < nc; ++n) out(p, q) += rho(p * nc + n, q * nc + n);
  return out;
}

Matrix qubit_identity() { return Matrix::Identity(2, 2); }

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix qubit_raise() {
  Matrix m = Matrix::Zero(2, 2);
  m(1, 0) = 1.0;
  return m;
}

Matrix qubit_lower() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}

Vector bell_phi_minus() {
  Vector v = Vector::Zero(4);
  v(1) = 1.0 / std::sqrt(2.0);   // |ge>
  v(2) = -1.0 / std::sqrt(2.0);  // |eg>
  return v;
}

Vector bell_phi_plus() {
  Vector v = Vector::Zero(4);
  v(1) = 1.0 / std::sqrt(2.0);
  v(2) = 1.0 / std::sqrt(2.0);
  return v;
}

double hermiticity_defect(const Matrix& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

}  // namespace bellstab

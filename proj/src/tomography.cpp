#include "bellstab/tomography.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/SVD>

namespace bellstab {

namespace {

Matrix rotation(const Matrix& axis, double theta) {
  // exp(-i theta axis/2) = cos(theta/2) I - i sin(theta/2) axis for axis^2 = I.
  return std::cos(theta / 2.0) * Matrix::Identity(2, 2) -
         Complex(0, 1) * std::sin(theta / 2.0) * axis;
}

Matrix pauli_by_index(int p) {
  switch (p) {
    case 0: return qubit_identity();
    case 1: return pauli_x();
    case 2: return pauli_y();
    case 3: return pauli_z();
  }
  throw std::invalid_argument("pauli_by_index: out of range");
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

RotationSet RotationSet::standard() {
  RotationSet r;
  r.u[0] = Matrix::Identity(2, 2);
  r.u[1] = rotation(pauli_x(), std::numbers::pi);
  r.u[2] = rotation(pauli_x(), std::numbers::pi / 2.0);
  r.u[3] = rotation(pauli_y(), std::numbers::pi / 2.0);
  return r;
}

DesignMatrix build_design_matrix(const RotationSet& rots) {
  Matrix p_gg = Matrix::Zero(4, 4);
  p_gg(0, 0) = 1.0;

  DesignMatrix d;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      const Matrix u = kron(rots.u[i], rots.u[j]);
      const Matrix obs = u.adjoint() * p_gg * u;
      for (int p = 0; p < 4; ++p)
        for (int q = 0; q < 4; ++q) {
          const Matrix pq = kron(pauli_by_index(p), pauli_by_index(q));
          // coefficient of P_p ⊗ P_q in obs (Paulis are trace-orthogonal)
          d.m(4 * i + j, 4 * p + q) = (obs * pq).trace().real() / 4.0;
        }
    }
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 16, 16>> svd(d.m);
  d.condition_number = svd.singularValues()(0) / svd.singularValues()(15);
  return d;
}

std::array<double, 16> simulate_tomography(const Matrix& rho2q, const RotationSet& rots) {
  if (rho2q.rows() != 4 || rho2q.cols() != 4)
    throw std::invalid_argument("simulate_tomography: expected 4x4 state");
  std::array<double, 16> out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      const Matrix u = kron(rots.u[i], rots.u[j]);
      out[4 * i + j] = (u * rho2q * u.adjoint())(0, 0).real();
    }
  return out;
}

std::array<double, 16> simulate_tomography(const Matrix& rho2q, const RotationSet& rots,
                                           const ReadoutModel& readout, long shots,
                                           std::uint64_t seed) {
  if (shots <= 0) throw std::invalid_argument("simulate_tomography: shots must be positive");
  std::array<double, 16> out{};
  for (int r = 0; r < 16; ++r) {
    const Matrix u = kron(rots.u[r / 4], rots.u[r % 4]);
    const Matrix rot = u * rho2q * u.adjoint();
    std::array<double, 4> p{};
    double sum = 0;
    for (int i = 0; i < 4; ++i) {
      p[i] = std::max(0.0, rot(i, i).real());
      sum += p[i];
    }
    std::mt19937_64 rng(splitmix(seed ^ (0x5eedULL + std::uint64_t(r))));

    // Multinomial split of the shot budget over the four labels, then a
    // binomial draw of "read gg" per label through the assignment model.
    long remaining = shots;
    double prob_left = sum;
    long read_gg = 0;
    for (int label = 0; label < 4 && remaining > 0; ++label) {
      const double pl = (label < 3) ? std::min(1.0, p[label] / prob_left) : 1.0;
      long n_label = remaining;
      if (label < 3) {
        std::binomial_distribution<long> bin(remaining, pl);
        n_label = bin(rng);
      }
      const double p_read = assigned_gg_probability(readout, label == 0, readout.threshold);
      if (n_label > 0 && p_read > 0) {
        std::binomial_distribution<long> bin(n_label, p_read);
        read_gg += bin(rng);
      }
      remaining -= n_label;
      prob_left -= p[label];
      if (prob_left <= 0) break;
    }
    out[size_t(r)] = double(read_gg) / double(shots);
  }
  return out;
}

PauliVector reconstruct(const std::array<double, 16>& outcomes, const DesignMatrix& design) {
  // The II coefficient is 1/4 in every row; move it to the left-hand side.
  Eigen::Matrix<double, 16, 15> d15 = design.m.rightCols<15>();
  Eigen::Matrix<double, 16, 1> rhs;
  for (int r = 0; r < 16; ++r) rhs(r) = outcomes[size_t(r)] - design.m(r, 0) * 1.0;
  const Eigen::Matrix<double, 15, 1> sol =
      d15.colPivHouseholderQr().solve(rhs);
  PauliVector pv;
  pv.values[0] = 1.0;
  for (int k = 0; k < 15; ++k) pv.values[size_t(k + 1)] = sol(k);
  return pv;
}

std::vector<Matrix> clifford_product_states() {
  std::vector<Vector> single;
  const double s = 1.0 / std::sqrt(2.0);
  auto ket = [](Complex a, Complex b) {
    Vector v(2);
    v << a, b;
    return v;
  };
  single.push_back(ket(1, 0));                    // +Z = |g>
  single.push_back(ket(0, 1));                    // -Z = |e>
  single.push_back(ket(s, s));                    // +X
  single.push_back(ket(s, -s));                   // -X
  single.push_back(ket(s, Complex(0, 1) * s));    // +Y
  single.push_back(ket(s, Complex(0, -1) * s));   // -Y

  std::vector<Matrix> out;
  for (const auto& va : single)
    for (const auto& vb : single) {
      Vector v = Vector::Zero(4);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) v(2 * i + j) = va(i) * vb(j);
      out.push_back(v * v.adjoint());
    }
  return out;
}

std::vector<double> clifford_suite(const RotationSet& rots, const ReadoutModel* readout,
                                   long shots, std::uint64_t seed) {
  const DesignMatrix design = build_design_matrix(rots);
  const auto states = clifford_product_states();
  std::vector<double> fids;
  fids.reserve(states.size());
  for (size_t k = 0; k < states.size(); ++k) {
    const auto outcomes =
        readout ? simulate_tomography(states[k], rots, *readout, shots,
                                      splitmix(seed ^ (0xc11ffULL + k)))
                : simulate_tomography(states[k], rots);
    const Matrix rec = density_from_pauli(reconstruct(outcomes, design));
    fids.push_back((states[k] * rec).trace().real());
  }
  return fids;
}

}  // namespace bellstab

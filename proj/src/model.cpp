#include "bellstab/model.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace bellstab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}
}  // namespace

void SystemParams::validate() const {
  require(chi_a_mhz > 0 && chi_b_mhz > 0, "chi must be positive");
  require(kappa_mhz >= 0, "kappa must be non-negative");
  require(t1_a_us > 0 && t1_b_us > 0, "T1 must be positive");
  require(tphi_a_us > 0 && tphi_b_us > 0, "Tphi must be positive");
  require(cavity_levels >= 2, "need at least 2 cavity levels");
  require(p_excited_a >= 0 && p_excited_a <= 1, "p_excited_a out of [0,1]");
  require(p_excited_b >= 0 && p_excited_b <= 1, "p_excited_b out of [0,1]");
}

SystemParams SystemParams::device() {
  SystemParams p;
  p.chi_a_mhz = 6.5;
  p.chi_b_mhz = 5.9;
  p.kappa_mhz = 1.7;
  p.t1_a_us = 16.0;
  p.t1_b_us = 9.0;
  p.tphi_a_us = tphi_from_t1_t2(16.0, 8.0);  // 32/3
  p.tphi_b_us = tphi_from_t1_t2(9.0, 12.0);  // 36
  p.cavity_levels = 15;
  p.p_excited_a = 0.07;
  p.p_excited_b = 0.07;
  return p;
}

void DriveParams::validate() const {
  require(nbar >= 0, "nbar must be non-negative");
  require(omega0_mhz >= 0 && omegan_mhz >= 0, "drive amplitudes must be non-negative");
  require(n_repump >= 0, "n_repump must be non-negative");
}

DriveParams DriveParams::nominal(double kappa_mhz) {
  DriveParams d;
  d.nbar = 3.0;
  d.omega0_mhz = kappa_mhz / 2.0;
  d.omegan_mhz = kappa_mhz / 2.0;
  d.n_repump = int(std::lround(d.nbar));
  return d;
}

double tphi_from_t1_t2(double t1_us, double t2_us) {
  require(t1_us > 0 && t2_us > 0, "tphi_from_t1_t2: times must be positive");
  const double inv = 1.0 / t2_us - 1.0 / (2.0 * t1_us);
  if (inv < 0) throw std::invalid_argument("tphi_from_t1_t2: T2 exceeds 2*T1");
  if (inv == 0) return kInfinite;
  return 1.0 / inv;
}

double epsilon_from_nbar(double kappa_mhz, double nbar) {
  require(kappa_mhz >= 0 && nbar >= 0, "epsilon_from_nbar: negative input");
  return kappa_mhz * std::sqrt(nbar) / 2.0;
}

double zeno_parameter(const SystemParams& sys, const DriveParams& drives) {
  require(drives.omega0_mhz > 0, "zeno_parameter: omega0 must be positive");
  return (drives.nbar * sys.kappa_mhz / 2.0) / drives.omega0_mhz;
}

StabilizerModel::StabilizerModel(const SystemParams& sys, const DriveParams& drives)
    : sys_(sys), drives_(drives), space_(sys.cavity_levels) {
  sys_.validate();
  drives_.validate();

  const double chi_a_w = kTwoPi * sys_.chi_a_mhz;
  const double chi_b_w = kTwoPi * sys_.chi_b_mhz;
  const double kappa_w = kTwoPi * sys_.kappa_mhz;
  const double omega0_w = kTwoPi * drives_.omega0_mhz;
  omegan_w_ = kTwoPi * drives_.omegan_mhz;
  eps_c_w_ = kTwoPi * epsilon_from_nbar(sys_.kappa_mhz, drives_.nbar);
  nu_c_ = (chi_a_w + chi_b_w) / 2.0;
  nu_r_ = drives_.n_repump * nu_c_;

  const Matrix a_full = embed(annihilation(space_.cavity_levels), Subsystem::Cavity, space_);
  const Matrix num_full = a_full.adjoint() * a_full;
  const Matrix z_a = embed(pauli_z(), Subsystem::QubitA, space_);
  const Matrix z_b = embed(pauli_z(), Subsystem::QubitB, space_);
  const Matrix raise_a = embed(qubit_raise(), Subsystem::QubitA, space_);
  const Matrix raise_b = embed(qubit_raise(), Subsystem::QubitB, space_);

  // Dispersive shift: +(chi_A + chi_B)/2 per photon for |gg>.
  Matrix h = (chi_a_w / 2.0) * z_a * num_full + (chi_b_w / 2.0) * z_b * num_full;

  // Zero-photon Rabi drives; Alice along x, Bob rotated by phase_0.
  const Complex ph0 = std::polar(1.0, drives_.phase_0);
  Matrix drive0 = raise_a + ph0 * raise_b;
  h += omega0_w * (drive0 + drive0.adjoint());
  h_static_ = h;

  cavity_op_ = a_full + a_full.adjoint();

  // n-photon tone, red-detuned by n*nu_c; e^{+i nu_r t} multiplies the
  // raising part so the tone is resonant with the red-shifted transitions.
  repump_op_ = raise_a + std::polar(1.0, drives_.phase_n) * raise_b;

  bell_projector_ = embed_qubit_pair(bell_phi_minus() * bell_phi_minus().adjoint(), space_);

  auto add_channel = [this](Matrix op, double rate, const char* label) {
    if (rate > 0 && std::isfinite(rate)) channels_.push_back({std::move(op), rate, label});
  };
  add_channel(a_full, kappa_w, "cavity_loss");
  add_channel(embed(qubit_lower(), Subsystem::QubitA, space_), 1.0 / sys_.t1_a_us, "relax_a");
  add_channel(embed(qubit_lower(), Subsystem::QubitB, space_), 1.0 / sys_.t1_b_us, "relax_b");
  add_channel(z_a, 1.0 / (2.0 * sys_.tphi_a_us), "dephase_a");
  add_channel(z_b, 1.0 / (2.0 * sys_.tphi_b_us), "dephase_b");
}

Matrix StabilizerModel::hamiltonian_at(double t_us) const {
  const Complex z = std::polar(1.0, nu_r_ * t_us);
  Matrix h = h_static_;
  h += (2.0 * eps_c_w_ * std::cos(nu_c_ * t_us)) * cavity_op_;
  const Matrix r = omegan_w_ * z * repump_op_;
  h += r + r.adjoint();
  return h;
}

Matrix StabilizerModel::initial_state() const {
  Matrix rho_a = Matrix::Zero(2, 2);
  rho_a(0, 0) = 1.0 - sys_.p_excited_a;
  rho_a(1, 1) = sys_.p_excited_a;
  Matrix rho_b = Matrix::Zero(2, 2);
  rho_b(0, 0) = 1.0 - sys_.p_excited_b;
  rho_b(1, 1) = sys_.p_excited_b;
  Matrix vac = Matrix::Zero(space_.cavity_levels, space_.cavity_levels);
  vac(0, 0) = 1.0;
  return kron(kron(rho_a, rho_b), vac);
}

double StabilizerModel::drive_period_us() const { return kTwoPi / nu_c_; }

}  // namespace bellstab

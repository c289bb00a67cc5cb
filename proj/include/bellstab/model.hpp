#pragma once

#include <limits>
#include <string>
#include <vector>

#include "bellstab/hilbert.hpp"

namespace bellstab {

inline constexpr double kInfinite = std::numeric_limits<double>::infinity();

// Device parameters.  Frequencies are ordinary (non-angular) MHz, times are
// microseconds; the 2*pi conversion happens once, inside StabilizerModel.
struct SystemParams {
  double chi_a_mhz = 6.5;
  double chi_b_mhz = 5.9;
  double kappa_mhz = 1.7;
  double t1_a_us = 16.0;
  double t1_b_us = 9.0;
  double tphi_a_us = kInfinite;
  double tphi_b_us = kInfinite;
  int cavity_levels = 15;
  double p_excited_a = 0.0;  // thermal excited-state population at t = 0
  double p_excited_b = 0.0;

  void validate() const;
  static SystemParams device();  // measured device values, thermal init
};

// Drive settings for the stabilization loop.  Amplitudes are the Hamiltonian
// coefficients in MHz (sigma_x convention: H = omega0 * (XA + XB) after the
// angular conversion).  phase_n/phase_0 are the phases of Bob's drives
// relative to his x axis; the loop needs the n-photon tone anti-parallel.
struct DriveParams {
  double nbar = 3.0;
  double omega0_mhz = 0.85;
  double omegan_mhz = 0.85;
  int n_repump = 3;
  double phase_n = 3.14159265358979323846;
  double phase_0 = 0.0;

  void validate() const;
  static DriveParams nominal(double kappa_mhz);  // nbar 3, omega = kappa/2
};

// 1/T_phi = 1/T2 - 1/(2 T1); throws if T2 > 2*T1 (unphysical).
double tphi_from_t1_t2(double t1_us, double t2_us);

// Cavity drive amplitude per tone, eps_c = kappa*sqrt(nbar)/2, in MHz.
double epsilon_from_nbar(double kappa_mhz, double nbar);

// Measurement-to-drive ratio (nbar*kappa/2)/omega0; dimensionless.
double zeno_parameter(const SystemParams& sys, const DriveParams& drives);

struct CollapseChannel {
  Matrix op;
  double rate;  // 1/us, already angular where applicable
  std::string label;
};

class StabilizerModel {
 public:
  StabilizerModel(const SystemParams& sys, const DriveParams& drives);

  const SystemParams& system() const { return sys_; }
  const DriveParams& drives() const { return drives_; }
  const HilbertSpace& space() const { return space_; }

  // Full rotating-frame Hamiltonian at time t (angular units, 1/us).
  Matrix hamiltonian_at(double t_us) const;

  const std::vector<CollapseChannel>& collapse_channels() const { return channels_; }

  const Matrix& bell_projector() const { return bell_projector_; }

  // Thermal qubit product state ⊗ cavity vacuum.
  Matrix initial_state() const;

  // Common period of all drive terms, 2*pi/nu_c.
  double drive_period_us() const;

  // Pieces the solver combines: H(t) = h_static + 2 eps_c cos(nu_c t) * C
  //                                    + omega_n (e^{+i nu_r t} R + h.c.)
  const Matrix& h_static() const { return h_static_; }
  const Matrix& cavity_drive_op() const { return cavity_op_; }
  const Matrix& repump_op() const { return repump_op_; }
  double cavity_mod_freq() const { return nu_c_; }      // angular, 1/us
  double repump_mod_freq() const { return nu_r_; }      // angular, 1/us
  double cavity_drive_amp() const { return eps_c_w_; }  // angular, 1/us
  double repump_amp() const { return omegan_w_; }       // angular, 1/us

 private:
  SystemParams sys_;
  DriveParams drives_;
  HilbertSpace space_;
  double nu_c_ = 0, nu_r_ = 0, eps_c_w_ = 0, omegan_w_ = 0;
  Matrix h_static_, cavity_op_, repump_op_, bell_projector_;
  std::vector<CollapseChannel> channels_;
};

}  // namespace bellstab

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "bellstab/analysis.hpp"
#include "bellstab/model.hpp"
#include "bellstab/solver.hpp"
#include "test_util.hpp"

using namespace bellstab;

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Literal master-equation right-hand side, assembled term by term from the
// model's published pieces; deliberately naive so it can arbitrate the
// optimized implementation.
Matrix textbook_rhs(const Matrix& rho, double t, const StabilizerModel& m) {
  const Matrix h = m.hamiltonian_at(t);
  Matrix out = Complex(0, -1) * (h * rho - rho * h);
  for (const auto& ch : m.collapse_channels()) {
    const Matrix& l = ch.op;
    const Matrix ldl = l.adjoint() * l;
    out += ch.rate * (l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
  return out;
}

Matrix rk4_reference(Matrix y, double t1, int steps, const StabilizerModel& m) {
  const double h = t1 / steps;
  for (int k = 0; k < steps; ++k) {
    const double t = k * h;
    const Matrix k1 = textbook_rhs(y, t, m);
    const Matrix k2 = textbook_rhs(y + 0.5 * h * k1, t + 0.5 * h, m);
    const Matrix k3 = textbook_rhs(y + 0.5 * h * k2, t + 0.5 * h, m);
    const Matrix k4 = textbook_rhs(y + h * k3, t + h, m);
    y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return y;
}

SystemParams small_device(int levels) {
  SystemParams sys = SystemParams::device();
  sys.cavity_levels = levels;
  return sys;
}

DriveParams drives_off() {
  DriveParams d;
  d.nbar = 0.0;
  d.omega0_mhz = 0.0;
  d.omegan_mhz = 0.0;
  return d;
}
}  // namespace

TEST_CASE("density matrix diagnostics") {
  DensityMatrix dm;
  dm.rho = Matrix::Zero(2, 2);
  dm.rho(0, 0) = 0.7;
  dm.rho(1, 1) = 0.4;
  CHECK(dm.trace_defect() == doctest::Approx(0.1).epsilon(1e-12));
  dm.rho(0, 1) = Complex(0.0, 0.25);
  dm.rho(1, 0) = Complex(0.0, 0.05);  // hermitian partner would be -0.25i
  CHECK(dm.hermiticity() == doctest::Approx(0.3).epsilon(1e-9));
  dm.rho = Matrix::Zero(3, 3);
  dm.rho.diagonal() << 0.6, 0.45, -0.05;
  CHECK(dm.min_eigenvalue() == doctest::Approx(-0.05).epsilon(1e-9));
}

TEST_CASE("right-hand side matches the term-by-term master equation") {
  StabilizerModel m(small_device(5), DriveParams::nominal(1.7));
  const int d = m.space().dim();
  std::mt19937_64 rng(211);
  for (int rep = 0; rep < 5; ++rep) {
    const Matrix rho = testutil::random_hermitian(d, rng);
    const double t = 0.7 * rep + 0.13;
    const Matrix fast = lindblad_rhs(rho, t, m);
    const Matrix slow = textbook_rhs(rho, t, m);
    CHECK((fast - slow).cwiseAbs().maxCoeff() < 1e-9);
    CHECK(std::abs(fast.trace()) < 1e-10);        // generator is trace-free
    CHECK(hermiticity_defect(fast) < 1e-10);      // and hermiticity-preserving
  }
}

TEST_CASE("adaptive integration agrees with a fixed-step reference") {
  StabilizerModel m(small_device(6), DriveParams::nominal(1.7));
  // thermal background plus a coherent cross-block component
  Matrix rho0 = m.initial_state();
  Vector psi = (m.space().basis_ket(0, 0, 0) + m.space().basis_ket(1, 1, 2)) /
               std::sqrt(2.0);
  rho0 = 0.9 * rho0 + 0.1 * (psi * psi.adjoint());

  const double t_end = 0.05;
  const Matrix ref = rk4_reference(rho0, t_end, 1000, m);

  SolverOptions opts;
  opts.rtol = 1e-9;
  opts.atol = 1e-12;
  Trajectory traj = evolve(rho0, t_end, m, opts);
  CHECK(traj.final().time_us == doctest::Approx(t_end));
  CHECK((traj.final().rho - ref).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("trajectory snapshots conserve trace, hermiticity and positivity") {
  StabilizerModel m(SystemParams::device(), DriveParams::nominal(1.7));
  SolverOptions opts;
  opts.snapshot_times = {0.0, 0.1, 0.25, 0.4};
  Trajectory traj = evolve(m.initial_state(), 0.4, m, opts);
  REQUIRE(traj.snapshots.size() == 4);
  for (const auto& snap : traj.snapshots) {
    DensityMatrix dm{snap.rho, snap.time_us};
    CHECK(dm.trace_defect() < 1e-10);
    CHECK(dm.hermiticity() < 1e-11);
    CHECK(dm.min_eigenvalue() > -1e-8);
  }
  CHECK(traj.stats.accepted > 0);
  CHECK(traj.stats.rhs_evals == 1 + 6 * (traj.stats.accepted + traj.stats.rejected));
}

TEST_CASE("cavity decay follows the analytic exponential") {
  SystemParams sys = small_device(6);
  sys.t1_a_us = sys.t1_b_us = kInfinite;
  sys.tphi_a_us = sys.tphi_b_us = kInfinite;
  StabilizerModel m(sys, drives_off());
  const Vector fock3 = m.space().basis_ket(0, 0, 3);
  const Matrix rho0 = fock3 * fock3.adjoint();

  SolverOptions opts;
  opts.rtol = 1e-8;
  opts.atol = 1e-12;
  opts.snapshot_times = {0.1, 0.25, 0.5};
  Trajectory traj = evolve(rho0, 0.5, m, opts);

  const Matrix num = embed(Matrix(annihilation(6).adjoint() * annihilation(6)),
                           Subsystem::Cavity, m.space());
  const double kappa_w = kTwoPi * sys.kappa_mhz;
  for (const auto& snap : traj.snapshots) {
    const double expected = 3.0 * std::exp(-kappa_w * snap.time_us);
    const double got = expectation(snap.rho, num).real();
    CHECK(std::abs(got - expected) / expected < 1e-6);
  }
}

TEST_CASE("qubit relaxation follows the analytic exponential") {
  SystemParams sys = small_device(2);
  sys.kappa_mhz = 0.0;
  sys.tphi_a_us = sys.tphi_b_us = kInfinite;
  sys.p_excited_a = sys.p_excited_b = 0.07;
  StabilizerModel m(sys, drives_off());

  SolverOptions opts;
  opts.rtol = 1e-9;
  opts.atol = 1e-13;
  Trajectory traj = evolve(m.initial_state(), 2.0, m, opts);
  const Matrix za = embed(pauli_z(), Subsystem::QubitA, m.space());
  const Matrix zb = embed(pauli_z(), Subsystem::QubitB, m.space());
  const double za_expect = 1.0 - 0.14 * std::exp(-2.0 / sys.t1_a_us);
  const double zb_expect = 1.0 - 0.14 * std::exp(-2.0 / sys.t1_b_us);
  CHECK(expectation(traj.final().rho, za).real() ==
        doctest::Approx(za_expect).epsilon(1e-8));
  CHECK(expectation(traj.final().rho, zb).real() ==
        doctest::Approx(zb_expect).epsilon(1e-8));
}

TEST_CASE("pure dephasing damps coherence at 1/T_phi") {
  SystemParams sys = small_device(2);
  sys.kappa_mhz = 0.0;
  sys.t1_a_us = sys.t1_b_us = kInfinite;
  sys.tphi_a_us = 32.0 / 3.0;
  sys.tphi_b_us = 36.0;
  StabilizerModel m(sys, drives_off());

  const Vector plus = (Vector(2) << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)).finished();
  const Vector vac = (Vector(2) << 1.0, 0.0).finished();
  const Vector psi0 = kron(kron(plus, plus), vac);
  const Matrix rho0 = psi0 * psi0.adjoint();

  SolverOptions opts;
  opts.rtol = 1e-9;
  opts.atol = 1e-13;
  const double t_end = 2.0;
  Trajectory traj = evolve(rho0, t_end, m, opts);
  const Matrix xa = embed(pauli_x(), Subsystem::QubitA, m.space());
  const Matrix xb = embed(pauli_x(), Subsystem::QubitB, m.space());
  CHECK(expectation(traj.final().rho, xa).real() ==
        doctest::Approx(std::exp(-t_end / sys.tphi_a_us)).epsilon(1e-8));
  CHECK(expectation(traj.final().rho, xb).real() ==
        doctest::Approx(std::exp(-t_end / sys.tphi_b_us)).epsilon(1e-8));
}

TEST_CASE("purity is conserved in the unitary limit") {
  SystemParams sys = small_device(3);
  sys.kappa_mhz = 0.0;  // also zeroes the cavity drive amplitude
  sys.t1_a_us = sys.t1_b_us = kInfinite;
  sys.tphi_a_us = sys.tphi_b_us = kInfinite;
  sys.p_excited_a = sys.p_excited_b = 0.07;
  StabilizerModel m(sys, DriveParams::nominal(1.7));  // qubit drives stay on

  const Matrix rho0 = m.initial_state();
  const double purity0 = (rho0 * rho0).trace().real();
  CHECK(purity0 < 1.0);

  SolverOptions opts;
  opts.rtol = 1e-9;
  opts.atol = 1e-13;
  Trajectory traj = evolve(rho0, 0.3, m, opts);
  const Matrix& rho = traj.final().rho;
  CHECK(std::abs((rho * rho).trace().real() - purity0) < 1e-8);
  CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);
}

TEST_CASE("snapshot bookkeeping and edge cases") {
  StabilizerModel m(small_device(3), DriveParams::nominal(1.7));
  SolverOptions opts;
  opts.snapshot_times = {0.05, 0.0, 0.05, 7.0, 0.2};  // unsorted, duplicate, out of range
  Trajectory traj = evolve(m.initial_state(), 0.2, m, opts);
  REQUIRE(traj.snapshots.size() == 3);
  CHECK(traj.snapshots[0].time_us == 0.0);
  CHECK(traj.snapshots[1].time_us == 0.05);
  CHECK(traj.snapshots[2].time_us == 0.2);

  Trajectory still = evolve(m.initial_state(), 0.0, m, {});
  REQUIRE(still.snapshots.size() == 1);
  CHECK(still.snapshots[0].time_us == 0.0);
  CHECK(still.stats.accepted == 0);

  CHECK_THROWS_AS(evolve(Matrix::Identity(3, 3), 1.0, m, {}), std::invalid_argument);
  CHECK_THROWS_AS(evolve(m.initial_state(), -1.0, m, {}), std::invalid_argument);
}

TEST_CASE("conjugate drive phases produce the mirrored trajectory") {
  const SystemParams sys = SystemParams::device();
  DriveParams base = DriveParams::nominal(sys.kappa_mhz);
  DriveParams flipped = base;
  flipped.phase_n = 0.0;
  flipped.phase_0 = std::numbers::pi;

  SolverOptions opts;
  opts.rtol = 1e-5;
  opts.atol = 1e-8;
  StabilizerModel mb(sys, base), mf(sys, flipped);
  Trajectory tb = evolve(mb.initial_state(), 1.0, mb, opts);
  Trajectory tf = evolve(mf.initial_state(), 1.0, mf, opts);

  // conjugation by Z_B swaps the Bell doublet, so the flipped run stabilizes
  // |phi+> at exactly the base run's |phi-> overlap
  const Matrix rho_b = partial_trace_cavity(tb.final().rho, mb.space());
  const Matrix rho_f = partial_trace_cavity(tf.final().rho, mf.space());
  const Vector plus = bell_phi_plus();
  const double f_plus_flipped = (plus.adjoint() * rho_f * plus)(0).real();
  CHECK(f_plus_flipped == doctest::Approx(fidelity_two_qubit(rho_b)).epsilon(1e-9));
  CHECK(tb.stats.accepted == tf.stats.accepted);
}

TEST_CASE("steady_state reports a vanishing residual for a stationary state") {
  SystemParams sys = small_device(4);
  sys.p_excited_a = sys.p_excited_b = 0.0;  // exact ground state, all channels idle
  StabilizerModel m(sys, drives_off());
  SteadyResult res = steady_state(m, 1.0, {});
  CHECK(res.stationarity_residual < 1e-10);
  CHECK(res.state.time_us == doctest::Approx(1.0));
  CHECK(fidelity(res.state.rho, m.space()) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK((res.state.rho - m.initial_state()).cwiseAbs().maxCoeff() < 1e-10);
}

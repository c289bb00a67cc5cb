#include "bellstab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

namespace bellstab {

namespace {

using SpMat = Eigen::SparseMatrix<Complex>;

constexpr double kPruneTol = 1e-14;

SpMat sparsify(const Matrix& m) {
  return m.sparseView(kPruneTol, 1.0);
}

// Operators compiled once per evolve.  The derivative of a Hermitian rho is
// assembled as A + A^dag with A = -i H_eff(t) rho + (1/2) sum rate L rho L^dag,
// H_eff = H(t) - (i/2) sum rate L^dag L, which keeps the result Hermitian to
// machine precision and costs one sparse product per operator term.
struct CompiledRhs {
  SpMat h_static, cavity_op, repump, repump_dag, damping;
  struct Jump {
    SpMat op;
    double half_rate;
  };
  std::vector<Jump> jumps;
  double drive2_w, nu_c, nu_r, omegan_w;

  explicit CompiledRhs(const StabilizerModel& m)
      : h_static(sparsify(m.h_static())),
        cavity_op(sparsify(m.cavity_drive_op())),
        repump(sparsify(m.repump_op())),
        repump_dag(sparsify(m.repump_op().adjoint())),
        drive2_w(2.0 * m.cavity_drive_amp()),
        nu_c(m.cavity_mod_freq()),
        nu_r(m.repump_mod_freq()),
        omegan_w(m.repump_amp()) {
    const int d = m.space().dim();
    Matrix k = Matrix::Zero(d, d);
    for (const auto& ch : m.collapse_channels()) {
      jumps.push_back({sparsify(ch.op), 0.5 * ch.rate});
      k += ch.rate * (ch.op.adjoint() * ch.op);
    }
    damping = sparsify(0.5 * k);
  }

  void operator()(double t, const Matrix& rho, Matrix& out) const {
    const Complex i_unit(0.0, 1.0);
    const Complex z = std::polar(omegan_w, nu_r * t);

    Matrix h_rho = h_static * rho;
    h_rho.noalias() += (drive2_w * std::cos(nu_c * t)) * (cavity_op * rho);
    h_rho.noalias() += z * (repump * rho);
    h_rho.noalias() += std::conj(z) * (repump_dag * rho);

    Matrix a = (-i_unit) * h_rho;
    a.noalias() -= damping * rho;
    for (const auto& j : jumps) {
      const Matrix l_rho = j.op * rho;
      a.noalias() += j.half_rate * (j.op * l_rho.adjoint());
    }
    out = a + a.adjoint();
  }
};

// Dormand-Prince 5(4) tableau (FSAL).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// b (5th order) minus b-hat (4th order), applied to k1..k7 for the error.
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

double error_norm(const Matrix& err, const Matrix& y0, const Matrix& y1, double atol,
                  double rtol) {
  double acc = 0.0;
  const auto* e = err.data();
  const auto* a = y0.data();
  const auto* b = y1.data();
  const Eigen::Index n = err.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sc = atol + rtol * std::max(std::abs(a[i]), std::abs(b[i]));
    const double q = std::abs(e[i]) / sc;
    acc += q * q;
  }
  return std::sqrt(acc / double(n));
}

void check_snapshot(const DensityMatrix& s, const SolverOptions&) {
  // Abort thresholds are 10x the contract tolerances.
  const double tr = s.trace_defect();
  if (tr > 1e-7)
    throw SolverError("trace drifted beyond tolerance at t=" + std::to_string(s.time_us), s.time_us, tr);
  const double he = s.hermiticity();
  if (he > 1e-9)
    throw SolverError("hermiticity lost at t=" + std::to_string(s.time_us), s.time_us, he);
  const double ev = s.min_eigenvalue();
  if (ev < -1e-6)
    throw SolverError("state left the positive cone at t=" + std::to_string(s.time_us), s.time_us, ev);
}

}  // namespace

double DensityMatrix::trace_defect() const { return std::abs(rho.trace() - Complex(1.0, 0.0)); }

double DensityMatrix::hermiticity() const { return hermiticity_defect(rho); }

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (rho + rho.adjoint()),
                                           Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

Matrix lindblad_rhs(const Matrix& rho, double t_us, const StabilizerModel& model) {
  CompiledRhs rhs(model);
  Matrix out;
  rhs(t_us, rho, out);
  return out;
}

Trajectory evolve(const Matrix& rho0, double t_end_us, const StabilizerModel& model,
                  const SolverOptions& opts) {
  const int d = model.space().dim();
  if (rho0.rows() != d || rho0.cols() != d)
    throw std::invalid_argument("evolve: initial state dimension mismatch");
  if (t_end_us < 0) throw std::invalid_argument("evolve: negative end time");

  CompiledRhs rhs(model);
  Trajectory traj;

  std::vector<double> snaps = opts.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  snaps.erase(std::unique(snaps.begin(), snaps.end()), snaps.end());
  while (!snaps.empty() && snaps.back() > t_end_us + 1e-12) snaps.pop_back();
  if (snaps.empty() || std::abs(snaps.back() - t_end_us) > 1e-12) snaps.push_back(t_end_us);
  size_t next_snap = 0;

  double t = 0.0;
  Matrix y = rho0;
  auto record = [&](double tt) {
    traj.snapshots.push_back({tt, y});
    check_snapshot({y, tt}, opts);
  };
  while (next_snap < snaps.size() && snaps[next_snap] <= 1e-15) {
    record(0.0);
    ++next_snap;
  }
  if (t_end_us <= 1e-15) {
    if (traj.snapshots.empty()) record(0.0);
    return traj;
  }

  Matrix k1(d, d), k2(d, d), k3(d, d), k4(d, d), k5(d, d), k6(d, d), k7(d, d);
  Matrix ytmp(d, d), ynew(d, d), err(d, d);
  rhs(t, y, k1);
  traj.stats.rhs_evals++;

  double h = std::min({opts.h_init_us, opts.h_max_us, t_end_us});
  const double h_floor = 1e-12;

  while (t < t_end_us - 1e-15) {
    bool hit_snap = false;
    double target = t + h;
    if (next_snap < snaps.size() && snaps[next_snap] <= target + 1e-15) {
      target = snaps[next_snap];
      hit_snap = true;
    }
    const double hs = target - t;

    ytmp = y + (hs * a21) * k1;
    rhs(t + c2 * hs, ytmp, k2);
    ytmp = y + hs * (a31 * k1 + a32 * k2);
    rhs(t + c3 * hs, ytmp, k3);
    ytmp = y + hs * (a41 * k1 + a42 * k2 + a43 * k3);
    rhs(t + c4 * hs, ytmp, k4);
    ytmp = y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    rhs(t + c5 * hs, ytmp, k5);
    ytmp = y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    rhs(t + hs, ytmp, k6);
    ynew = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    rhs(t + hs, ynew, k7);
    traj.stats.rhs_evals += 6;

    err = hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const double en = error_norm(err, y, ynew, opts.atol, opts.rtol);

    if (en <= 1.0) {
      t = target;
      y.swap(ynew);
      k1.swap(k7);  // FSAL
      traj.stats.accepted++;
      if (hit_snap) {
        record(t);
        ++next_snap;
      }
      const double grow = (en == 0.0) ? 5.0 : 0.9 * std::pow(en, -0.2);
      const double h_from_err = hs * std::clamp(grow, 0.2, 5.0);
      // A step clipped to land on a snapshot must not shrink the controller.
      h = std::min(opts.h_max_us, hit_snap ? std::max(h, h_from_err) : h_from_err);
    } else {
      traj.stats.rejected++;
      h = hs * std::clamp(0.9 * std::pow(en, -0.2), 0.1, 0.9);
      if (h < h_floor)
        throw SolverError("step size underflow at t=" + std::to_string(t), t, en);
    }
  }
  return traj;
}

SteadyResult steady_state(const StabilizerModel& model, double t_final_us,
                          const SolverOptions& opts) {
  SolverOptions o = opts;
  const double t_mark = t_final_us - model.drive_period_us();
  if (t_mark > 0) o.snapshot_times.push_back(t_mark);
  Trajectory traj = evolve(model.initial_state(), t_final_us, model, o);

  double residual = 0.0;
  if (t_mark > 0) {
    const Matrix* prev = nullptr;
    for (const auto& s : traj.snapshots)
      if (std::abs(s.time_us - t_mark) < 1e-9) prev = &s.rho;
    if (prev) residual = (traj.final().rho - *prev).norm();
  }
  return {{traj.final().rho, traj.final().time_us}, residual, traj.stats};
}

}  // namespace bellstab

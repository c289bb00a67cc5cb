#include "bellstab/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <utility>

#include <Eigen/Eigenvalues>

namespace bellstab {

namespace {

const char* kPauliNames = "IXYZ";

Matrix pauli_by_index(int p) {
  switch (p) {
    case 0: return qubit_identity();
    case 1: return pauli_x();
    case 2: return pauli_y();
    case 3: return pauli_z();
  }
  throw std::invalid_argument("pauli_by_index: out of range");
}

void require_two_qubit(const Matrix& rho) {
  if (rho.rows() != 4 || rho.cols() != 4)
    throw std::invalid_argument("expected a 4x4 two-qubit state");
}

}  // namespace

std::string PauliVector::label(int flat) {
  if (flat < 0 || flat > 15) throw std::invalid_argument("PauliVector::label: out of range");
  return std::string{kPauliNames[flat / 4], kPauliNames[flat % 4]};
}

double fidelity(const Matrix& rho_full, const HilbertSpace& space) {
  const Matrix proj =
      embed_qubit_pair(bell_phi_minus() * bell_phi_minus().adjoint(), space);
  return expectation(rho_full, proj).real();
}

double fidelity_two_qubit(const Matrix& rho2q) {
  require_two_qubit(rho2q);
  const Vector phi = bell_phi_minus();
  return (phi.adjoint() * rho2q * phi)(0).real();
}

PauliVector pauli_averages(const Matrix& rho2q) {
  require_two_qubit(rho2q);
  PauliVector out;
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q)
      out.values[PauliVector::index(p, q)] =
          expectation(rho2q, kron(pauli_by_index(p), pauli_by_index(q))).real();
  return out;
}

Matrix density_from_pauli(const PauliVector& pv) {
  Matrix rho = Matrix::Zero(4, 4);
  for (int p = 0; p < 4; ++p)
    for (int q = 0; q < 4; ++q)
      rho += pv(p, q) * kron(pauli_by_index(p), pauli_by_index(q));
  return 0.25 * rho;
}

double concurrence(const Matrix& rho2q) {
  require_two_qubit(rho2q);
  const Matrix yy = kron(pauli_y(), pauli_y());
  const Matrix rho_tilde = yy * rho2q.conjugate() * yy;
  Eigen::ComplexEigenSolver<Matrix> es(rho2q * rho_tilde, false);
  std::array<double, 4> lam{};
  for (int i = 0; i < 4; ++i)
    lam[i] = std::sqrt(std::max(0.0, es.eigenvalues()(i).real()));
  std::sort(lam.begin(), lam.end(), std::greater<>());
  return std::max(0.0, lam[0] - lam[1] - lam[2] - lam[3]);
}

BasisWeights basis_weights(const Matrix& rho2q) {
  require_two_qubit(rho2q);
  auto overlap = [&](const Vector& v) { return (v.adjoint() * rho2q * v)(0).real(); };
  Vector gg = Vector::Zero(4), ee = Vector::Zero(4);
  gg(0) = 1.0;
  ee(3) = 1.0;
  return {overlap(gg), overlap(ee), overlap(bell_phi_plus()), overlap(bell_phi_minus())};
}

ExponentialFit fit_exponential(const std::vector<double>& t_us,
                               const std::vector<double>& f) {
  if (t_us.size() != f.size() || t_us.size() < 4)
    throw std::invalid_argument("fit_exponential: need >= 4 matched samples");
  for (size_t i = 1; i < t_us.size(); ++i)
    if (t_us[i] <= t_us[i - 1])
      throw std::invalid_argument("fit_exponential: times must be strictly ascending");

  const auto [fmin_it, fmax_it] = std::minmax_element(f.begin(), f.end());
  if (*fmax_it - *fmin_it < 1e-9)
    throw std::runtime_error("fit_exponential: series is constant, tau is unidentifiable");

  const double span = t_us.back() - t_us.front();
  const size_t n = t_us.size();

  // For fixed tau the model is linear in (f_inf, f_0); profile over log(tau).
  auto sse_for = [&](double tau, double* f_inf_out, double* f_0_out) {
    double s11 = 0, s12 = 0, s22 = 0, b1v = 0, b2v = 0;
    for (size_t i = 0; i < n; ++i) {
      const double e = std::exp(-(t_us[i] - t_us.front()) / tau);
      const double g1 = 1.0 - e, g2 = e;
      s11 += g1 * g1;
      s12 += g1 * g2;
      s22 += g2 * g2;
      b1v += g1 * f[i];
      b2v += g2 * f[i];
    }
    const double det = s11 * s22 - s12 * s12;
    if (std::abs(det) < 1e-14) return std::numeric_limits<double>::infinity();
    const double f_inf = (s22 * b1v - s12 * b2v) / det;
    const double f_0 = (s11 * b2v - s12 * b1v) / det;
    double sse = 0;
    for (size_t i = 0; i < n; ++i) {
      const double e = std::exp(-(t_us[i] - t_us.front()) / tau);
      const double r = f[i] - (f_inf - (f_inf - f_0) * e);
      sse += r * r;
    }
    if (f_inf_out) *f_inf_out = f_inf;
    if (f_0_out) *f_0_out = f_0;
    return sse;
  };

  const double lo = std::log(span / 1000.0), hi = std::log(span * 20.0);
  double best_x = lo, best_sse = std::numeric_limits<double>::infinity();
  const int kScan = 128;
  for (int i = 0; i <= kScan; ++i) {
    const double x = lo + (hi - lo) * i / kScan;
    const double s = sse_for(std::exp(x), nullptr, nullptr);
    if (s < best_sse) {
      best_sse = s;
      best_x = x;
    }
  }
  double a = std::max(lo, best_x - (hi - lo) / kScan);
  double b = std::min(hi, best_x + (hi - lo) / kScan);
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
  double s1 = sse_for(std::exp(x1), nullptr, nullptr);
  double s2 = sse_for(std::exp(x2), nullptr, nullptr);
  for (int it = 0; it < 200 && (b - a) > 1e-12; ++it) {
    if (s1 < s2) {
      b = x2;
      x2 = x1;
      s2 = s1;
      x1 = b - gr * (b - a);
      s1 = sse_for(std::exp(x1), nullptr, nullptr);
    } else {
      a = x1;
      x1 = x2;
      s1 = s2;
      x2 = a + gr * (b - a);
      s2 = sse_for(std::exp(x2), nullptr, nullptr);
    }
  }
  ExponentialFit fit;
  fit.tau_us = std::exp(0.5 * (a + b));
  const double sse = sse_for(fit.tau_us, &fit.f_inf, &fit.f_0);
  if (!std::isfinite(sse))
    throw std::runtime_error("fit_exponential: normal equations are singular");
  fit.rms_residual = std::sqrt(sse / double(n));
  return fit;
}

ErrorBudget error_budget(const SystemParams& sys, const DriveParams& drives,
                         double t_final_us, const SolverOptions& opts, int workers) {
  SystemParams ideal = sys;
  ideal.chi_a_mhz = sys.chi_b_mhz;  // matched
  ideal.t1_a_us = ideal.t1_b_us = kInfinite;
  ideal.tphi_a_us = ideal.tphi_b_us = kInfinite;
  ideal.p_excited_a = ideal.p_excited_b = 0.0;

  SystemParams mism = ideal;
  mism.chi_a_mhz = sys.chi_a_mhz;

  SystemParams relax = ideal;
  relax.t1_a_us = sys.t1_a_us;
  relax.t1_b_us = sys.t1_b_us;

  SystemParams dephase = ideal;
  dephase.tphi_a_us = sys.tphi_a_us;
  dephase.tphi_b_us = sys.tphi_b_us;

  const std::vector<std::pair<std::string, SystemParams>> configs = {
      {"ideal", ideal},
      {"chi_mismatch", mism},
      {"relaxation", relax},
      {"dephasing", dephase},
      {"full", sys},
  };

  std::vector<double> fids(configs.size(), 0.0);
  std::atomic<size_t> next{0};
  auto work = [&] {
    for (size_t i = next.fetch_add(1); i < configs.size(); i = next.fetch_add(1)) {
      StabilizerModel m(configs[i].second, drives);
      fids[i] = fidelity(steady_state(m, t_final_us, opts).state.rho, m.space());
    }
  };
  workers = std::max(1, std::min<int>(workers, int(configs.size())));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  ErrorBudget out;
  for (size_t i = 0; i < configs.size(); ++i)
    out.entries.push_back({configs[i].first, fids[i], fids[0] - fids[i]});
  return out;
}

}  // namespace bellstab

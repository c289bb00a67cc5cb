#include "bellstab/readout.hpp"

#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

namespace bellstab {

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

// P(N(mu, sigma) >= t)
double upper_tail(double mu, double sigma, double t) {
  return normal_cdf((mu - t) / sigma);
}

std::array<double, 4> diagonal_probs(const Matrix& rho2q) {
  if (rho2q.rows() != 4 || rho2q.cols() != 4)
    throw std::invalid_argument("readout: expected a 4x4 two-qubit state");
  std::array<double, 4> p{};
  double sum = 0;
  for (int i = 0; i < 4; ++i) {
    p[i] = std::max(0.0, rho2q(i, i).real());
    sum += p[i];
  }
  if (sum <= 0) throw std::invalid_argument("readout: state has no population");
  for (auto& v : p) v /= sum;
  return p;
}

}  // namespace

ReadoutModel ReadoutModel::tomography() {
  ReadoutModel m;
  m.mu_gg = 5.5;
  m.mu_not = 0.0;
  m.sigma_gg_ratio = 0.75;
  // error-balanced: (mu_gg - t)/ratio = t - mu_not, equal overlap tails
  m.threshold = 5.5 / 1.75;
  m.eps_gg = 0.04;
  m.eps_not = 0.03;
  return m;
}

ReadoutModel ReadoutModel::conditioning() {
  ReadoutModel m;
  m.mu_gg = 2.0;
  m.mu_not = 0.0;
  m.sigma_gg_ratio = 0.75;
  m.threshold = -2.2;
  m.eps_gg = 0.04;
  m.eps_not = 0.03;
  return m;
}

double assigned_gg_probability(const ReadoutModel& m, bool true_gg, double threshold) {
  const double tail_gg = upper_tail(m.mu_gg, m.sigma_gg_ratio, threshold);
  const double tail_not = upper_tail(m.mu_not, 1.0, threshold);
  if (true_gg) return (1.0 - m.eps_gg) * tail_gg + m.eps_gg * tail_not;
  return (1.0 - m.eps_not) * tail_not + m.eps_not * tail_gg;
}

AssignmentFidelity assignment_fidelity(const ReadoutModel& m) {
  return {assigned_gg_probability(m, true, m.threshold),
          1.0 - assigned_gg_probability(m, false, m.threshold)};
}

std::vector<double> sample_outcomes(const Matrix& rho2q, const ReadoutModel& m,
                                    long shots, std::uint64_t seed) {
  if (shots < 0) throw std::invalid_argument("sample_outcomes: negative shot count");
  const auto p = diagonal_probs(rho2q);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::vector<double> out;
  out.reserve(size_t(shots));
  for (long s = 0; s < shots; ++s) {
    double u = uni(rng);
    int label = 3;
    for (int i = 0; i < 3; ++i) {
      if (u < p[i]) {
        label = i;
        break;
      }
      u -= p[i];
    }
    bool as_gg = (label == 0);
    const double flip = uni(rng);
    if (as_gg ? (flip < m.eps_gg) : (flip < m.eps_not)) as_gg = !as_gg;
    const double mu = as_gg ? m.mu_gg : m.mu_not;
    const double sigma = as_gg ? m.sigma_gg_ratio : 1.0;
    out.push_back(mu + sigma * gauss(rng));
  }
  return out;
}

ConditionResult condition_on_m1(const Matrix& rho_full, const HilbertSpace& space,
                                const ReadoutModel& m, double threshold,
                                double kept_floor) {
  if (rho_full.rows() != space.dim() || rho_full.cols() != space.dim())
    throw std::invalid_argument("condition_on_m1: dimension mismatch");

  // Keep = outcome below threshold (read as not-GG).
  const double keep_gg = 1.0 - assigned_gg_probability(m, true, threshold);
  const double keep_not = 1.0 - assigned_gg_probability(m, false, threshold);

  Matrix p_gg4 = Matrix::Zero(4, 4);
  p_gg4(0, 0) = 1.0;
  const Matrix proj_gg = embed_qubit_pair(p_gg4, space);
  const Matrix proj_not = Matrix::Identity(space.dim(), space.dim()) - proj_gg;

  const Matrix block_gg = proj_gg * rho_full * proj_gg;
  const Matrix block_not = proj_not * rho_full * proj_not;
  const double w_gg = block_gg.trace().real();
  const double w_not = block_not.trace().real();

  ConditionResult res;
  res.kept_fraction = keep_gg * w_gg + keep_not * w_not;
  res.usable = res.kept_fraction >= kept_floor;
  if (res.kept_fraction > 0)
    res.rho_cond = (keep_gg * block_gg + keep_not * block_not) / res.kept_fraction;
  else
    res.rho_cond = Matrix::Zero(space.dim(), space.dim());
  return res;
}

Histogram histogram(const std::vector<double>& samples, double bin_width) {
  if (bin_width <= 0) throw std::invalid_argument("histogram: bin width must be positive");
  Histogram h;
  h.bin_width = bin_width;
  if (samples.empty()) return h;
  double lo = samples[0], hi = samples[0];
  for (double s : samples) {
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  const long first = long(std::floor(lo / bin_width));
  const long last = long(std::floor(hi / bin_width));
  h.origin = double(first) * bin_width;
  h.counts.assign(size_t(last - first + 1), 0);
  for (double s : samples) {
    long b = long(std::floor(s / bin_width)) - first;
    b = std::max<long>(0, std::min<long>(b, long(h.counts.size()) - 1));
    h.counts[size_t(b)]++;
  }
  h.total = long(samples.size());
  return h;
}

}  // namespace bellstab

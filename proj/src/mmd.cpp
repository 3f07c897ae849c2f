#include "stvae/mmd.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace stvae::vae {

namespace {

double sq_dist(const std::vector<double>& x, const std::vector<double>& y) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double d = x[i] - y[i];
    d2 += d * d;
  }
  return d2;
}

void check_sets(const std::vector<std::vector<double>>& q,
                const std::vector<std::vector<double>>& p) {
  if (q.empty() || p.empty()) throw std::invalid_argument("mmd: empty sample set");
  std::size_t k = q[0].size();
  for (const auto& v : q) {
    if (v.size() != k) throw std::invalid_argument("mmd: ragged sample dimensions in q");
  }
  for (const auto& v : p) {
    if (v.size() != k) throw std::invalid_argument("mmd: sample dimensions differ between sets");
  }
}

// Mean kernel over all ordered pairs of one set.
double within_mean(const std::vector<std::vector<double>>& s, double tau2, bool unbiased) {
  const std::size_t n = s.size();
  if (unbiased && n < 2) {
    throw std::invalid_argument("mmd: unbiased estimator needs >= 2 samples per set");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (unbiased && i == j) continue;
      acc += std::exp(-sq_dist(s[i], s[j]) / (2.0 * tau2));
    }
  }
  double pairs = unbiased ? static_cast<double>(n) * (n - 1) : static_cast<double>(n) * n;
  return acc / pairs;
}

}  // namespace

double gaussian_kernel(const std::vector<double>& x, const std::vector<double>& y, double tau2) {
  if (tau2 <= 0.0) throw std::invalid_argument("gaussian_kernel: tau2 must be > 0");
  if (x.size() != y.size()) {
    throw std::invalid_argument("gaussian_kernel: length mismatch " + std::to_string(x.size()) +
                                " vs " + std::to_string(y.size()));
  }
  return std::exp(-sq_dist(x, y) / (2.0 * tau2));
}

double mmd(const std::vector<std::vector<double>>& samples_q,
           const std::vector<std::vector<double>>& samples_p, const MmdConfig& config) {
  check_sets(samples_q, samples_p);
  const double tau2 = config.resolved_tau2(static_cast<int>(samples_q[0].size()));
  if (tau2 <= 0.0) throw std::invalid_argument("mmd: tau2 must be > 0");

  double qq = within_mean(samples_q, tau2, config.unbiased);
  double pp = within_mean(samples_p, tau2, config.unbiased);
  double cross = 0.0;
  for (const auto& x : samples_q) {
    for (const auto& y : samples_p) {
      cross += std::exp(-sq_dist(x, y) / (2.0 * tau2));
    }
  }
  cross /= static_cast<double>(samples_q.size()) * samples_p.size();
  return qq + pp - 2.0 * cross;
}

std::vector<std::vector<double>> mmd_grad_q(const std::vector<std::vector<double>>& samples_q,
                                            const std::vector<std::vector<double>>& samples_p,
                                            const MmdConfig& config) {
  check_sets(samples_q, samples_p);
  const std::size_t n = samples_q.size(), m = samples_p.size(), k = samples_q[0].size();
  const double tau2 = config.resolved_tau2(static_cast<int>(k));

  std::vector<std::vector<double>> grads(n, std::vector<double>(k, 0.0));
  double qq_pairs = config.unbiased ? static_cast<double>(n) * (n - 1) : static_cast<double>(n) * n;
  if (qq_pairs == 0.0) qq_pairs = 1.0;

  // d k(a,b)/d a = k(a,b) (b - a) / tau2; each unordered (i,j) pair appears
  // twice in the all-pairs mean, once with z_i in each argument slot.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;  // self-pair kernel is constant 1
      double kv = std::exp(-sq_dist(samples_q[i], samples_q[j]) / (2.0 * tau2));
      double scale = 2.0 * kv / (tau2 * qq_pairs);
      for (std::size_t d = 0; d < k; ++d) {
        grads[i][d] += scale * (samples_q[j][d] - samples_q[i][d]);
      }
    }
  }
  double cross_scale = 2.0 / (static_cast<double>(n) * m * tau2);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double kv = std::exp(-sq_dist(samples_q[i], samples_p[j]) / (2.0 * tau2));
      for (std::size_t d = 0; d < k; ++d) {
        grads[i][d] -= cross_scale * kv * (samples_p[j][d] - samples_q[i][d]);
      }
    }
  }
  return grads;
}

}  // namespace stvae::vae

#ifndef STVAE_MMD_HPP
#define STVAE_MMD_HPP

#include <vector>

namespace stvae::vae {

struct MmdConfig {
  // Gaussian kernel bandwidth; values <= 0 mean "use latent_dim / 2".
  double tau2 = 0.0;
  // Prior draws per batch; <= 0 means "match the batch size".
  int prior_samples = 0;
  // Weight of the MMD term in the training objective.
  double lambda = 1.0;
  // Default is the all-pairs V-statistic (nonnegative, exactly zero on equal
  // sample sets); the U-statistic drops self-pairs.
  bool unbiased = false;

  double resolved_tau2(int latent_dim) const {
    return tau2 > 0.0 ? tau2 : latent_dim / 2.0;
  }
};

// k(x,y) = exp(-|x-y|^2 / (2 tau2)), in (0,1], equal to 1 iff x == y.
double gaussian_kernel(const std::vector<double>& x, const std::vector<double>& y, double tau2);

// E[k(x,x')] + E[k(y,y')] - 2 E[k(x,y)] with expectations estimated over all
// ordered pairs (including self-pairs unless config.unbiased).
double mmd(const std::vector<std::vector<double>>& samples_q,
           const std::vector<std::vector<double>>& samples_p, const MmdConfig& config);

// Gradient of mmd(...) with respect to each vector in samples_q.
std::vector<std::vector<double>> mmd_grad_q(const std::vector<std::vector<double>>& samples_q,
                                            const std::vector<std::vector<double>>& samples_p,
                                            const MmdConfig& config);

}  // namespace stvae::vae

#endif

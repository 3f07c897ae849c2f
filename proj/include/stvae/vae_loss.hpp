#ifndef STVAE_VAE_LOSS_HPP
#define STVAE_VAE_LOSS_HPP

#include <vector>

#include "stvae/mmd.hpp"
#include "stvae/vae.hpp"

namespace stvae::vae {

struct VaeLossValue {
  double total = 0.0;
  double reconstruction = 0.0;
  double regularization = 0.0;  // raw MMD, before the lambda weight
};

// total = reconstruction + lambda * mmd(encode(batch), prior_samples)
VaeLossValue vae_loss(const VaeModel& model, const nn::Tensor& batch,
                      const std::vector<std::vector<double>>& prior_samples,
                      const MmdConfig& config);

// Loss together with the gradient with respect to every parameter, packed in
// VaeModel::pack_params order.
VaeLossValue vae_loss_grad(const VaeModel& model, const nn::Tensor& batch,
                           const std::vector<std::vector<double>>& prior_samples,
                           const MmdConfig& config, std::vector<double>& grad_out);

// KL-VAE variant pieces.
// 0.5 * sum_k (sigma2_k + mu_k^2 - 1 - ln sigma2_k), nonnegative, zero iff
// mu = 0 and sigma2 = 1.
double kl_gaussian_closed_form(const std::vector<double>& mu, const std::vector<double>& sigma2);

// mu + sigma (.) noise
std::vector<double> reparameterize(const std::vector<double>& mu, const std::vector<double>& sigma,
                                   const std::vector<double>& noise);

// Negative-ELBO style objective for the KL variant: squared-distance
// reconstruction plus the mean closed-form KL over the batch.
double elbo_loss(const std::vector<std::vector<double>>& batch,
                 const std::vector<std::vector<double>>& reconstructions,
                 const std::vector<std::vector<double>>& mus,
                 const std::vector<std::vector<double>>& sigma2s);

}  // namespace stvae::vae

#endif

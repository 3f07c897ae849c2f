#include "stvae/vae_loss.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace stvae::vae {

using nn::Activation;
using nn::ConvGrads;
using nn::Tensor;

namespace {

std::vector<std::vector<double>> tensor_rows(const Tensor& t) {
  const int n = t.extent(0);
  const std::size_t w = t.size() / static_cast<std::size_t>(n);
  std::vector<std::vector<double>> rows(n, std::vector<double>(w));
  for (int i = 0; i < n; ++i) {
    std::memcpy(rows[i].data(), t.data() + i * w, w * sizeof(double));
  }
  return rows;
}

void check_batch(const VaeModel& model, const Tensor& batch) {
  if (batch.rank() != 4 || batch.extent(1) != model.arch.extent ||
      batch.extent(2) != model.arch.extent || batch.extent(3) != 1) {
    throw std::invalid_argument("vae_loss: batch shape " + batch.shape_str() +
                                " does not match model extent " +
                                std::to_string(model.arch.extent));
  }
  if (batch.extent(0) < 2) {
    throw std::invalid_argument("vae_loss: batch size must be >= 2 for the MMD term");
  }
}

}  // namespace

VaeLossValue vae_loss(const VaeModel& model, const Tensor& batch,
                      const std::vector<std::vector<double>>& prior_samples,
                      const MmdConfig& config) {
  check_batch(model, batch);
  Tensor codes = encode_batch(model, batch);
  Tensor recon = decode_batch(model, codes);
  VaeLossValue v;
  v.reconstruction = reconstruction_loss(batch, recon);
  v.regularization = mmd(tensor_rows(codes), prior_samples, config);
  v.total = v.reconstruction + config.lambda * v.regularization;
  return v;
}

VaeLossValue vae_loss_grad(const VaeModel& model, const Tensor& batch,
                           const std::vector<std::vector<double>>& prior_samples,
                           const MmdConfig& config, std::vector<double>& grad_out) {
  check_batch(model, batch);
  const int n = batch.extent(0);
  const int k = model.arch.latent_dim;
  const int e2 = model.arch.bottom_extent();
  const int c2 = model.arch.conv2_channels;
  const int flat = model.arch.flat_dim();

  // Encoder forward with caches.
  Tensor pre1 = nn::conv2d_preactivation(batch, model.enc_w1, model.enc_b1, model.conv1_spec());
  Tensor a1 = nn::activate(pre1, Activation::kRelu);
  Tensor pre2 = nn::conv2d_preactivation(a1, model.enc_w2, model.enc_b2, model.conv2_spec());
  Tensor a2 = nn::activate(pre2, Activation::kRelu);
  Tensor a2_flat({n, flat}, a2.vec());
  Tensor codes = nn::dense_preactivation(a2_flat, model.enc_wd, model.enc_bd);  // identity head

  // Decoder forward with caches.
  Tensor pred = nn::dense_preactivation(codes, model.dec_wd, model.dec_bd);
  Tensor ad = nn::activate(pred, Activation::kRelu);
  Tensor cube({n, e2, e2, c2}, ad.vec());
  Tensor preu = nn::deconv2d_preactivation(cube, model.dec_w1, model.dec_b1, model.deconv1_spec());
  Tensor au = nn::activate(preu, Activation::kRelu);
  Tensor prey = nn::deconv2d_preactivation(au, model.dec_w2, model.dec_b2, model.deconv2_spec());
  Tensor recon = nn::activate(prey, Activation::kSigmoid);

  VaeLossValue v;
  v.reconstruction = reconstruction_loss(batch, recon);
  auto code_rows = tensor_rows(codes);
  v.regularization = mmd(code_rows, prior_samples, config);
  v.total = v.reconstruction + config.lambda * v.regularization;

  // d recon / d output: mean over batch of per-sample SSE.
  Tensor g_recon(recon.shape());
  for (std::size_t i = 0; i < recon.size(); ++i) {
    g_recon[i] = 2.0 * (recon[i] - batch[i]) / n;
  }

  ConvGrads g_dec2 =
      nn::deconv2d_backward_cached(au, model.dec_w2, prey, g_recon, model.deconv2_spec());
  ConvGrads g_dec1 =
      nn::deconv2d_backward_cached(cube, model.dec_w1, preu, g_dec2.input, model.deconv1_spec());
  Tensor g_ad({n, flat}, g_dec1.input.vec());
  ConvGrads g_decd = nn::dense_backward_cached(codes, model.dec_wd, pred, g_ad, Activation::kRelu);

  // Gradient into the codes: decoder path plus the MMD term.
  Tensor g_codes = g_decd.input;
  auto g_mmd = mmd_grad_q(code_rows, prior_samples, config);
  for (int s = 0; s < n; ++s) {
    for (int d = 0; d < k; ++d) {
      g_codes.data()[static_cast<std::size_t>(s) * k + d] += config.lambda * g_mmd[s][d];
    }
  }

  ConvGrads g_encd =
      nn::dense_backward_cached(a2_flat, model.enc_wd, codes, g_codes, Activation::kIdentity);
  Tensor g_a2(a2.shape(), g_encd.input.vec());
  ConvGrads g_enc2 = nn::conv2d_backward_cached(a1, model.enc_w2, pre2, g_a2, model.conv2_spec());
  ConvGrads g_enc1 =
      nn::conv2d_backward_cached(batch, model.enc_w1, pre1, g_enc2.input, model.conv1_spec());

  grad_out.clear();
  grad_out.reserve(model.param_count());
  auto push_t = [&grad_out](const Tensor& t) {
    grad_out.insert(grad_out.end(), t.vec().begin(), t.vec().end());
  };
  auto push_v = [&grad_out](const std::vector<double>& vv) {
    grad_out.insert(grad_out.end(), vv.begin(), vv.end());
  };
  push_t(g_enc1.weights);
  push_v(g_enc1.bias);
  push_t(g_enc2.weights);
  push_v(g_enc2.bias);
  push_t(g_encd.weights);
  push_v(g_encd.bias);
  push_t(g_decd.weights);
  push_v(g_decd.bias);
  push_t(g_dec1.weights);
  push_v(g_dec1.bias);
  push_t(g_dec2.weights);
  push_v(g_dec2.bias);
  return v;
}

double kl_gaussian_closed_form(const std::vector<double>& mu, const std::vector<double>& sigma2) {
  if (mu.size() != sigma2.size()) {
    throw std::invalid_argument("kl_gaussian_closed_form: length mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    if (sigma2[i] <= 0.0) {
      throw std::invalid_argument("kl_gaussian_closed_form: nonpositive variance at index " +
                                  std::to_string(i));
    }
    acc += sigma2[i] + mu[i] * mu[i] - 1.0 - std::log(sigma2[i]);
  }
  return 0.5 * acc;
}

std::vector<double> reparameterize(const std::vector<double>& mu, const std::vector<double>& sigma,
                                   const std::vector<double>& noise) {
  if (mu.size() != sigma.size() || mu.size() != noise.size()) {
    throw std::invalid_argument("reparameterize: length mismatch");
  }
  std::vector<double> z(mu.size());
  for (std::size_t i = 0; i < mu.size(); ++i) z[i] = mu[i] + sigma[i] * noise[i];
  return z;
}

double elbo_loss(const std::vector<std::vector<double>>& batch,
                 const std::vector<std::vector<double>>& reconstructions,
                 const std::vector<std::vector<double>>& mus,
                 const std::vector<std::vector<double>>& sigma2s) {
  if (batch.size() != mus.size() || batch.size() != sigma2s.size()) {
    throw std::invalid_argument("elbo_loss: batch and moment counts differ");
  }
  double recon = reconstruction_loss(batch, reconstructions);
  double kl = 0.0;
  for (std::size_t i = 0; i < mus.size(); ++i) {
    kl += kl_gaussian_closed_form(mus[i], sigma2s[i]);
  }
  return recon + kl / static_cast<double>(mus.size());
}

}  // namespace stvae::vae

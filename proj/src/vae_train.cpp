#include "stvae/vae_train.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "stvae/adam.hpp"

namespace stvae::vae {

using nn::Tensor;

namespace {

std::vector<std::vector<double>> draw_prior(Rng& rng, int count, int dim) {
  std::vector<std::vector<double>> s(count, std::vector<double>(dim));
  for (auto& v : s) {
    for (auto& x : v) x = rng.normal();
  }
  return s;
}

Tensor gather_batch(const std::vector<std::vector<double>>& fields, const std::vector<int>& order,
                    std::size_t begin, std::size_t end, int extent) {
  const std::size_t cells = static_cast<std::size_t>(extent) * extent;
  Tensor x({static_cast<int>(end - begin), extent, extent, 1});
  for (std::size_t i = begin; i < end; ++i) {
    std::memcpy(x.data() + (i - begin) * cells, fields[order[i]].data(), cells * sizeof(double));
  }
  return x;
}

}  // namespace

VaeLossValue evaluate_loss(const VaeModel& model, const std::vector<std::vector<double>>& fields,
                           const MmdConfig& mmd_config, std::uint64_t prior_seed) {
  if (fields.empty()) throw std::invalid_argument("evaluate_loss: empty field set");
  const int extent = model.arch.extent;
  Tensor x = fields_to_tensor(fields, extent);
  Tensor codes = encode_batch(model, x);
  Tensor recon = decode_batch(model, codes);

  VaeLossValue v;
  v.reconstruction = reconstruction_loss(x, recon);
  const int k = model.arch.latent_dim;
  std::vector<std::vector<double>> code_rows(fields.size(), std::vector<double>(k));
  for (std::size_t i = 0; i < fields.size(); ++i) {
    std::memcpy(code_rows[i].data(), codes.data() + i * k, k * sizeof(double));
  }
  Rng prior_rng(prior_seed);
  auto prior = draw_prior(prior_rng, static_cast<int>(fields.size()), k);
  v.regularization = mmd(code_rows, prior, mmd_config);
  v.total = v.reconstruction + mmd_config.lambda * v.regularization;
  return v;
}

TrainResult train(VaeModel model, const std::vector<std::vector<double>>& train_fields,
                  const std::vector<std::vector<double>>& validation_fields,
                  const TrainConfig& train_config, const MmdConfig& mmd_config) {
  if (train_fields.empty() || validation_fields.empty()) {
    throw std::invalid_argument("train: train and validation sets must be non-empty");
  }
  if (train_config.epochs < 1) throw std::invalid_argument("train: epochs must be >= 1");
  if (train_config.batch_size < 2) {
    throw std::invalid_argument("train: batch size must be >= 2 (the MMD term needs pairs)");
  }

  const int extent = model.arch.extent;
  const int k = model.arch.latent_dim;

  std::vector<double> params = model.pack_params();
  nn::AdamState adam(params.size(), train_config.learning_rate);

  Rng rng(derive_seed(train_config.seed, "vae-train"));
  std::vector<int> order(train_fields.size());
  std::iota(order.begin(), order.end(), 0);

  TrainResult result;
  result.history.reserve(train_config.epochs);
  double best_val = std::numeric_limits<double>::infinity();
  std::vector<double> best_params = params;

  for (int epoch = 0; epoch < train_config.epochs; ++epoch) {
    rng.shuffle(order);
    EpochStats stats;
    std::size_t n_batches = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += train_config.batch_size) {
      std::size_t end = std::min(order.size(), begin + train_config.batch_size);
      if (end - begin < 2) break;  // a trailing singleton cannot feed the MMD term
      Tensor x = gather_batch(train_fields, order, begin, end, extent);
      int n_prior = mmd_config.prior_samples > 0 ? mmd_config.prior_samples
                                                 : static_cast<int>(end - begin);
      auto prior = draw_prior(rng, n_prior, k);

      std::vector<double> grads;
      VaeLossValue v = vae_loss_grad(model, x, prior, mmd_config, grads);
      if (!std::isfinite(v.total)) {
        throw std::runtime_error("train: non-finite loss at epoch " + std::to_string(epoch + 1) +
                                 ", batch " + std::to_string(n_batches + 1));
      }
      nn::adam_step(params, grads, adam);
      model.unpack_params(params);

      stats.train_total += v.total;
      stats.train_reconstruction += v.reconstruction;
      stats.train_mmd += v.regularization;
      ++n_batches;
    }
    if (n_batches == 0) throw std::runtime_error("train: no usable batches");
    stats.train_total /= n_batches;
    stats.train_reconstruction /= n_batches;
    stats.train_mmd /= n_batches;

    VaeLossValue val = evaluate_loss(model, validation_fields, mmd_config,
                                     derive_seed(train_config.seed, 1000003ULL + epoch));
    stats.val_total = val.total;
    stats.val_reconstruction = val.reconstruction;
    stats.val_mmd = val.regularization;
    result.history.push_back(stats);

    if (val.total < best_val) {
      best_val = val.total;
      best_params = params;
      result.best_epoch = epoch;
    }
  }

  model.unpack_params(best_params);

  // Decoder noise variance: mean squared per-entry training residual at the
  // best epoch.
  Tensor xtr = fields_to_tensor(train_fields, extent);
  Tensor recon = decode_batch(model, encode_batch(model, xtr));
  double sse = 0.0;
  for (std::size_t i = 0; i < xtr.size(); ++i) {
    double d = xtr[i] - recon[i];
    sse += d * d;
  }
  model.sigma2 = sse / static_cast<double>(xtr.size());

  result.model = std::move(model);
  return result;
}

}  // namespace stvae::vae

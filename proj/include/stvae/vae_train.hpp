#ifndef STVAE_VAE_TRAIN_HPP
#define STVAE_VAE_TRAIN_HPP

#include <cstdint>
#include <vector>

#include "stvae/vae_loss.hpp"

namespace stvae::vae {

struct TrainConfig {
  int epochs = 50;
  int batch_size = 100;
  double learning_rate = 1e-4;
  std::uint64_t seed = 0;
};

struct EpochStats {
  double train_total = 0.0;
  double train_reconstruction = 0.0;
  double train_mmd = 0.0;
  double val_total = 0.0;
  double val_reconstruction = 0.0;
  double val_mmd = 0.0;
};

struct TrainResult {
  VaeModel model;  // weights of the epoch with minimal validation total loss
  std::vector<EpochStats> history;
  int best_epoch = 0;  // zero-based index into history
};

// Fields are normalized extent*extent grids. Fully reproducible from
// config.seed: shuffling, prior draws and (if the caller used the same seed
// for VaeModel::init) initialization.
TrainResult train(VaeModel model, const std::vector<std::vector<double>>& train_fields,
                  const std::vector<std::vector<double>>& validation_fields,
                  const TrainConfig& train_config, const MmdConfig& mmd_config);

// Loss over a whole set: per-field reconstruction plus lambda * MMD between
// all codes and an equal count of seeded prior draws.
VaeLossValue evaluate_loss(const VaeModel& model, const std::vector<std::vector<double>>& fields,
                           const MmdConfig& mmd_config, std::uint64_t prior_seed);

}  // namespace stvae::vae

#endif

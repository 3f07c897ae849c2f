#ifndef STVAE_VAE_IO_HPP
#define STVAE_VAE_IO_HPP

#include <string>

#include "stvae/vae_train.hpp"

namespace stvae::vae {

inline constexpr int kModelFormatVersion = 1;

// Single-line JSON container: architecture metadata, flat weight arrays in
// declared order, normalization constants, sigma2 and (optionally) training
// history. Serialization is canonical, so serialize(deserialize(bytes))
// reproduces bytes exactly.
std::string serialize_model(const VaeModel& model, const std::vector<EpochStats>& history = {},
                            int best_epoch = -1);

struct LoadedModel {
  VaeModel model;
  std::vector<EpochStats> history;
  int best_epoch = -1;
};

LoadedModel deserialize_model(const std::string& bytes);

void save_model_file(const std::string& path, const VaeModel& model,
                     const std::vector<EpochStats>& history = {}, int best_epoch = -1);
LoadedModel load_model_file(const std::string& path);

}  // namespace stvae::vae

#endif

#ifndef STVAE_TEST_SUPPORT_HPP
#define STVAE_TEST_SUPPORT_HPP

#include <vector>

#include "stvae/generators.hpp"
#include "stvae/rng.hpp"
#include "stvae/vae_train.hpp"

namespace test_support {

// Smooth synthetic fields in [0,1]: decoded outputs of a random decoder fed
// with linear latent paths. Deterministic in seed.
inline std::vector<std::vector<double>> synthetic_fields(int count, std::uint64_t seed,
                                                         int extent = 12) {
  stvae::vae::VaeArch arch;
  arch.latent_dim = 4;
  arch.extent = extent;
  arch.conv1_channels = 6;
  arch.conv2_channels = 8;
  stvae::vae::VaeModel source = stvae::vae::VaeModel::init(arch, seed ^ 0xabcdefULL);
  stvae::Rng rng(seed);
  std::vector<std::vector<double>> fields;
  fields.reserve(count);
  std::vector<double> z(arch.latent_dim);
  for (int i = 0; i < count; ++i) {
    for (auto& v : z) v = rng.normal();
    fields.push_back(stvae::vae::decode(source, z));
  }
  return fields;
}

// One small trained model shared across test cases (trained once per run).
inline const stvae::vae::TrainResult& trained_small_model() {
  static const stvae::vae::TrainResult result = [] {
    auto fields = synthetic_fields(240, 91);
    std::vector<std::vector<double>> train(fields.begin(), fields.begin() + 200);
    std::vector<std::vector<double>> val(fields.begin() + 200, fields.end());
    stvae::vae::VaeArch arch;
    arch.latent_dim = 4;
    arch.extent = 12;
    arch.conv1_channels = 8;
    arch.conv2_channels = 12;
    stvae::vae::VaeModel model = stvae::vae::VaeModel::init(arch, 5);
    model.norm_lower = -37.0;
    model.norm_upper = 5.0;
    stvae::vae::TrainConfig tc;
    tc.epochs = 12;
    tc.batch_size = 50;
    tc.learning_rate = 2e-3;
    tc.seed = 5;
    stvae::vae::MmdConfig mc;
    return stvae::vae::train(std::move(model), train, val, tc, mc);
  }();
  return result;
}

}  // namespace test_support

#endif

#ifndef STVAE_VAE_HPP
#define STVAE_VAE_HPP

#include <cstdint>
#include <vector>

#include "stvae/layers.hpp"
#include "stvae/tensor.hpp"

namespace stvae::vae {

// Convolutional autoencoder over square fields:
//   encoder: conv 3x3/s2 -> conv 3x3/s2 -> reshape -> dense to K (identity)
//   decoder: dense from K (relu) -> reshape -> deconv 3x3/s2 -> deconv 3x3/s2 (sigmoid)
// The encoder is deterministic and the decoder has constant noise variance,
// kept as metadata only; de-noised predictions never add it back.
struct VaeArch {
  int latent_dim = 8;
  int extent = 12;  // input is extent x extent x 1; must be divisible by 4
  int conv1_channels = 32;
  int conv2_channels = 64;

  int mid_extent() const { return nn::conv_out_extent(extent); }
  int bottom_extent() const { return nn::conv_out_extent(mid_extent()); }
  int flat_dim() const { return bottom_extent() * bottom_extent() * conv2_channels; }
  void validate() const;
};

struct VaeModel {
  VaeArch arch;

  nn::Tensor enc_w1;  // (3,3,1,c1)
  std::vector<double> enc_b1;
  nn::Tensor enc_w2;  // (3,3,c1,c2)
  std::vector<double> enc_b2;
  nn::Tensor enc_wd;  // (K, flat)
  std::vector<double> enc_bd;

  nn::Tensor dec_wd;  // (flat, K)
  std::vector<double> dec_bd;
  nn::Tensor dec_w1;  // (3,3,c1,c2) deconv c2 -> c1
  std::vector<double> dec_b1;
  nn::Tensor dec_w2;  // (3,3,1,c1) deconv c1 -> 1, sigmoid
  std::vector<double> dec_b2;

  // Normalization constants mapping raw field units into [0,1].
  double norm_lower = -37.0;
  double norm_upper = 3.0;

  // Decoder noise variance (mean squared per-entry training residual at the
  // best epoch); metadata only.
  double sigma2 = 0.0;

  static VaeModel init(const VaeArch& arch, std::uint64_t seed);

  std::size_t param_count() const;
  std::vector<double> pack_params() const;
  void unpack_params(const std::vector<double>& flat);

  nn::LayerSpec conv1_spec() const;
  nn::LayerSpec conv2_spec() const;
  nn::LayerSpec deconv1_spec() const;
  nn::LayerSpec deconv2_spec() const;
};

// Deterministic encoder; field is a normalized extent*extent grid in [0,1].
std::vector<double> encode(const VaeModel& model, const std::vector<double>& field);
// Deterministic decoder; output entries lie in (0,1).
std::vector<double> decode(const VaeModel& model, const std::vector<double>& code);

// Batched forms; x has shape (N, extent, extent, 1), codes (N, K).
nn::Tensor encode_batch(const VaeModel& model, const nn::Tensor& x);
nn::Tensor decode_batch(const VaeModel& model, const nn::Tensor& codes);

// Mean over the batch of the summed squared entrywise differences.
double reconstruction_loss(const nn::Tensor& batch, const nn::Tensor& reconstructions);
double reconstruction_loss(const std::vector<std::vector<double>>& batch,
                           const std::vector<std::vector<double>>& reconstructions);

nn::Tensor fields_to_tensor(const std::vector<std::vector<double>>& fields, int extent);

}  // namespace stvae::vae

#endif

#include "stvae/vae.hpp"

#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace stvae::vae {

using nn::Activation;
using nn::LayerKind;
using nn::LayerSpec;
using nn::Tensor;

void VaeArch::validate() const {
  if (latent_dim < 1) throw std::invalid_argument("VaeArch: latent_dim must be >= 1");
  if (conv1_channels < 1 || conv2_channels < 1) {
    throw std::invalid_argument("VaeArch: channel counts must be >= 1");
  }
  if (extent < 4 || extent % 4 != 0) {
    throw std::invalid_argument("VaeArch: extent must be a positive multiple of 4, got " +
                                std::to_string(extent));
  }
}

LayerSpec VaeModel::conv1_spec() const {
  return {LayerKind::kConv2d, 1, arch.conv1_channels, Activation::kRelu, 3, 2};
}
LayerSpec VaeModel::conv2_spec() const {
  return {LayerKind::kConv2d, arch.conv1_channels, arch.conv2_channels, Activation::kRelu, 3, 2};
}
LayerSpec VaeModel::deconv1_spec() const {
  return {LayerKind::kDeconv2d, arch.conv2_channels, arch.conv1_channels, Activation::kRelu, 3, 2};
}
LayerSpec VaeModel::deconv2_spec() const {
  return {LayerKind::kDeconv2d, arch.conv1_channels, 1, Activation::kSigmoid, 3, 2};
}

VaeModel VaeModel::init(const VaeArch& arch, std::uint64_t seed) {
  arch.validate();
  VaeModel m;
  m.arch = arch;
  const int c1 = arch.conv1_channels, c2 = arch.conv2_channels;
  const int k = arch.latent_dim, flat = arch.flat_dim();

  Rng rng(derive_seed(seed, "vae-init"));
  m.enc_w1 = Tensor({3, 3, 1, c1});
  nn::glorot_init(m.enc_w1, 9, 9 * c1, rng);
  m.enc_b1.assign(c1, 0.0);
  m.enc_w2 = Tensor({3, 3, c1, c2});
  nn::glorot_init(m.enc_w2, 9 * c1, 9 * c2, rng);
  m.enc_b2.assign(c2, 0.0);
  m.enc_wd = Tensor({k, flat});
  nn::glorot_init(m.enc_wd, flat, k, rng);
  m.enc_bd.assign(k, 0.0);

  m.dec_wd = Tensor({flat, k});
  nn::glorot_init(m.dec_wd, k, flat, rng);
  m.dec_bd.assign(flat, 0.0);
  m.dec_w1 = Tensor({3, 3, c1, c2});
  nn::glorot_init(m.dec_w1, 9 * c2, 9 * c1, rng);
  m.dec_b1.assign(c1, 0.0);
  m.dec_w2 = Tensor({3, 3, 1, c1});
  nn::glorot_init(m.dec_w2, 9 * c1, 9, rng);
  m.dec_b2.assign(1, 0.0);
  return m;
}

std::size_t VaeModel::param_count() const {
  return enc_w1.size() + enc_b1.size() + enc_w2.size() + enc_b2.size() + enc_wd.size() +
         enc_bd.size() + dec_wd.size() + dec_bd.size() + dec_w1.size() + dec_b1.size() +
         dec_w2.size() + dec_b2.size();
}

namespace {
void append(std::vector<double>& out, const std::vector<double>& v) {
  out.insert(out.end(), v.begin(), v.end());
}
void take(const std::vector<double>& flat, std::size_t& pos, std::vector<double>& v) {
  std::memcpy(v.data(), flat.data() + pos, v.size() * sizeof(double));
  pos += v.size();
}
}  // namespace

std::vector<double> VaeModel::pack_params() const {
  std::vector<double> flat;
  flat.reserve(param_count());
  append(flat, enc_w1.vec());
  append(flat, enc_b1);
  append(flat, enc_w2.vec());
  append(flat, enc_b2);
  append(flat, enc_wd.vec());
  append(flat, enc_bd);
  append(flat, dec_wd.vec());
  append(flat, dec_bd);
  append(flat, dec_w1.vec());
  append(flat, dec_b1);
  append(flat, dec_w2.vec());
  append(flat, dec_b2);
  return flat;
}

void VaeModel::unpack_params(const std::vector<double>& flat) {
  if (flat.size() != param_count()) {
    throw std::invalid_argument("VaeModel::unpack_params: expected " +
                                std::to_string(param_count()) + " values, got " +
                                std::to_string(flat.size()));
  }
  std::size_t pos = 0;
  take(flat, pos, enc_w1.vec());
  take(flat, pos, enc_b1);
  take(flat, pos, enc_w2.vec());
  take(flat, pos, enc_b2);
  take(flat, pos, enc_wd.vec());
  take(flat, pos, enc_bd);
  take(flat, pos, dec_wd.vec());
  take(flat, pos, dec_bd);
  take(flat, pos, dec_w1.vec());
  take(flat, pos, dec_b1);
  take(flat, pos, dec_w2.vec());
  take(flat, pos, dec_b2);
}

nn::Tensor fields_to_tensor(const std::vector<std::vector<double>>& fields, int extent) {
  if (fields.empty()) throw std::invalid_argument("fields_to_tensor: empty field list");
  const std::size_t cells = static_cast<std::size_t>(extent) * extent;
  Tensor x({static_cast<int>(fields.size()), extent, extent, 1});
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (fields[i].size() != cells) {
      throw std::invalid_argument("fields_to_tensor: field " + std::to_string(i) + " has " +
                                  std::to_string(fields[i].size()) + " cells, expected " +
                                  std::to_string(cells));
    }
    std::memcpy(x.data() + i * cells, fields[i].data(), cells * sizeof(double));
  }
  return x;
}

nn::Tensor encode_batch(const VaeModel& model, const Tensor& x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      throw std::invalid_argument("encode: non-finite field entry at offset " + std::to_string(i));
    }
  }
  Tensor a1 = nn::conv2d_forward(x, model.enc_w1, model.enc_b1, model.conv1_spec());
  Tensor a2 = nn::conv2d_forward(a1, model.enc_w2, model.enc_b2, model.conv2_spec());
  Tensor flat({a2.extent(0), model.arch.flat_dim()}, a2.vec());
  return nn::dense_forward(flat, model.enc_wd, model.enc_bd, Activation::kIdentity);
}

nn::Tensor decode_batch(const VaeModel& model, const Tensor& codes) {
  if (codes.rank() != 2 || codes.extent(1) != model.arch.latent_dim) {
    throw std::invalid_argument("decode: codes must be (N," +
                                std::to_string(model.arch.latent_dim) + "), got " +
                                codes.shape_str());
  }
  const int e2 = model.arch.bottom_extent();
  Tensor ad = nn::dense_forward(codes, model.dec_wd, model.dec_bd, Activation::kRelu);
  Tensor cube({codes.extent(0), e2, e2, model.arch.conv2_channels}, ad.vec());
  Tensor u1 = nn::deconv2d_forward(cube, model.dec_w1, model.dec_b1, model.deconv1_spec());
  return nn::deconv2d_forward(u1, model.dec_w2, model.dec_b2, model.deconv2_spec());
}

std::vector<double> encode(const VaeModel& model, const std::vector<double>& field) {
  Tensor x = fields_to_tensor({field}, model.arch.extent);
  return encode_batch(model, x).vec();
}

std::vector<double> decode(const VaeModel& model, const std::vector<double>& code) {
  if (static_cast<int>(code.size()) != model.arch.latent_dim) {
    throw std::invalid_argument("decode: code length " + std::to_string(code.size()) +
                                " does not match latent dim " +
                                std::to_string(model.arch.latent_dim));
  }
  Tensor z({1, model.arch.latent_dim}, code);
  return decode_batch(model, z).vec();
}

double reconstruction_loss(const Tensor& batch, const Tensor& reconstructions) {
  if (!batch.same_shape(reconstructions)) {
    throw std::invalid_argument("reconstruction_loss: shape mismatch " + batch.shape_str() +
                                " vs " + reconstructions.shape_str());
  }
  const int n = batch.extent(0);
  const std::size_t per = batch.size() / static_cast<std::size_t>(n);
  double total = 0.0;
  for (int s = 0; s < n; ++s) {
    const double* a = batch.data() + s * per;
    const double* b = reconstructions.data() + s * per;
    double sse = 0.0;
    for (std::size_t i = 0; i < per; ++i) {
      double d = a[i] - b[i];
      sse += d * d;
    }
    total += sse;
  }
  return total / n;
}

double reconstruction_loss(const std::vector<std::vector<double>>& batch,
                           const std::vector<std::vector<double>>& reconstructions) {
  if (batch.size() != reconstructions.size() || batch.empty()) {
    throw std::invalid_argument("reconstruction_loss: batch sizes differ or empty");
  }
  double total = 0.0;
  for (std::size_t s = 0; s < batch.size(); ++s) {
    if (batch[s].size() != reconstructions[s].size()) {
      throw std::invalid_argument("reconstruction_loss: field " + std::to_string(s) +
                                  " shape mismatch");
    }
    double sse = 0.0;
    for (std::size_t i = 0; i < batch[s].size(); ++i) {
      double d = batch[s][i] - reconstructions[s][i];
      sse += d * d;
    }
    total += sse;
  }
  return total / static_cast<double>(batch.size());
}

}  // namespace stvae::vae

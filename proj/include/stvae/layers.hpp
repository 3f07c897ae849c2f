#ifndef STVAE_LAYERS_HPP
#define STVAE_LAYERS_HPP

#include <vector>

#include "stvae/rng.hpp"
#include "stvae/tensor.hpp"

namespace stvae::nn {

enum class Activation { kIdentity, kRelu, kSigmoid };
enum class LayerKind { kConv2d, kDeconv2d, kDense, kReshape };

struct LayerSpec {
  LayerKind kind = LayerKind::kConv2d;
  int in_channels = 1;
  int out_channels = 1;
  Activation activation = Activation::kIdentity;
  int kernel = 3;  // fixed at 3 for conv kinds
  int stride = 2;  // fixed at 2 for conv kinds
};

double apply_activation(double pre, Activation act);
double activation_grad(double pre, Activation act);
Tensor activate(const Tensor& pre, Activation act);

// Stride-2 same-padding shape maps: conv halves extents by ceiling division,
// deconv doubles them (the exact inverse on even extents).
int conv_out_extent(int in);
int deconv_out_extent(int in);

struct ConvGrads {
  Tensor input;
  Tensor weights;
  std::vector<double> bias;
};

// x: (N,H,W,Cin), w: (3,3,Cin,Cout), b: Cout -> (N,ceil(H/2),ceil(W/2),Cout)
Tensor conv2d_forward(const Tensor& x, const Tensor& w, const std::vector<double>& b,
                      const LayerSpec& spec);
Tensor conv2d_preactivation(const Tensor& x, const Tensor& w, const std::vector<double>& b,
                            const LayerSpec& spec);
ConvGrads conv2d_backward(const Tensor& x, const Tensor& w, const std::vector<double>& b,
                          const Tensor& upstream, const LayerSpec& spec);
ConvGrads conv2d_backward_cached(const Tensor& x, const Tensor& w, const Tensor& pre,
                                 const Tensor& upstream, const LayerSpec& spec);

// x: (N,h,w,Cin), w: (3,3,Cout,Cin), b: Cout -> (N,2h,2w,Cout)
Tensor deconv2d_forward(const Tensor& x, const Tensor& w, const std::vector<double>& b,
                        const LayerSpec& spec);
Tensor deconv2d_preactivation(const Tensor& x, const Tensor& w, const std::vector<double>& b,
                              const LayerSpec& spec);
ConvGrads deconv2d_backward(const Tensor& x, const Tensor& w, const std::vector<double>& b,
                            const Tensor& upstream, const LayerSpec& spec);
ConvGrads deconv2d_backward_cached(const Tensor& x, const Tensor& w, const Tensor& pre,
                                   const Tensor& upstream, const LayerSpec& spec);

// x: (N,Fin), w: (Fout,Fin), b: Fout -> (N,Fout)
Tensor dense_forward(const Tensor& x, const Tensor& w, const std::vector<double>& b,
                     Activation act);
Tensor dense_preactivation(const Tensor& x, const Tensor& w, const std::vector<double>& b);
ConvGrads dense_backward(const Tensor& x, const Tensor& w, const std::vector<double>& b,
                         const Tensor& upstream, Activation act);
ConvGrads dense_backward_cached(const Tensor& x, const Tensor& w, const Tensor& pre,
                                const Tensor& upstream, Activation act);

// Single-vector convenience used by the encoder/decoder heads.
std::vector<double> dense_forward(const std::vector<double>& x, const Tensor& w,
                                  const std::vector<double>& b, Activation act);

// Uniform(-r, r) with r = sqrt(6 / (fan_in + fan_out)).
void glorot_init(Tensor& w, int fan_in, int fan_out, Rng& rng);

}  // namespace stvae::nn

#endif

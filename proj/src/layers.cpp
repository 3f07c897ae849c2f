#include "stvae/layers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace stvae::nn {

namespace {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

// Leading padding for the stride-2 same scheme; trailing padding is whatever
// remains. Matches out = ceil(in/2) exactly.
int pad_begin(int in) {
  int out = conv_out_extent(in);
  int total = std::max(0, (out - 1) * 2 + 3 - in);
  return total / 2;
}

void check_conv_spec(const LayerSpec& spec, LayerKind want, const char* name) {
  require(spec.kind == want, std::string(name) + ": wrong layer kind in spec");
  require(spec.kernel == 3 && spec.stride == 2,
          std::string(name) + ": kernel must be 3 and stride 2");
}

}  // namespace

double apply_activation(double pre, Activation act) {
  switch (act) {
    case Activation::kIdentity: return pre;
    case Activation::kRelu: return pre > 0.0 ? pre : 0.0;
    case Activation::kSigmoid: return 1.0 / (1.0 + std::exp(-pre));
  }
  return pre;
}

double activation_grad(double pre, Activation act) {
  switch (act) {
    case Activation::kIdentity: return 1.0;
    case Activation::kRelu: return pre > 0.0 ? 1.0 : 0.0;
    case Activation::kSigmoid: {
      double s = 1.0 / (1.0 + std::exp(-pre));
      return s * (1.0 - s);
    }
  }
  return 1.0;
}

Tensor activate(const Tensor& pre, Activation act) {
  Tensor out = pre;
  for (auto& v : out.vec()) v = apply_activation(v, act);
  return out;
}

int conv_out_extent(int in) { return (in + 1) / 2; }
int deconv_out_extent(int in) { return 2 * in; }

Tensor conv2d_preactivation(const Tensor& x, const Tensor& w, const std::vector<double>& b,
                            const LayerSpec& spec) {
  check_conv_spec(spec, LayerKind::kConv2d, "conv2d");
  require(x.rank() == 4, "conv2d: input rank must be 4 (NHWC), got " + x.shape_str());
  require(w.rank() == 4 && w.extent(0) == 3 && w.extent(1) == 3,
          "conv2d: weights must be (3,3,Cin,Cout), got " + w.shape_str());
  require(x.extent(3) == w.extent(2), "conv2d: input channels " + x.shape_str() +
                                          " do not match weights " + w.shape_str());
  require(static_cast<int>(b.size()) == w.extent(3),
          "conv2d: bias length " + std::to_string(b.size()) + " does not match filters " +
              std::to_string(w.extent(3)));

  const int n = x.extent(0), hin = x.extent(1), win = x.extent(2);
  const int cin = x.extent(3), cout = w.extent(3);
  const int hout = conv_out_extent(hin), wout = conv_out_extent(win);
  const int ph = pad_begin(hin), pw = pad_begin(win);

  Tensor pre({n, hout, wout, cout});
  for (int s = 0; s < n; ++s) {
    for (int oh = 0; oh < hout; ++oh) {
      for (int ow = 0; ow < wout; ++ow) {
        for (int oc = 0; oc < cout; ++oc) pre.at(s, oh, ow, oc) = b[oc];
        for (int kh = 0; kh < 3; ++kh) {
          int ih = oh * 2 + kh - ph;
          if (ih < 0 || ih >= hin) continue;
          for (int kw = 0; kw < 3; ++kw) {
            int iw = ow * 2 + kw - pw;
            if (iw < 0 || iw >= win) continue;
            for (int ic = 0; ic < cin; ++ic) {
              double xv = x.at(s, ih, iw, ic);
              const double* wrow = w.data() + ((static_cast<std::size_t>(kh) * 3 + kw) * cin + ic) * cout;
              double* prow = &pre.at(s, oh, ow, 0);
              for (int oc = 0; oc < cout; ++oc) prow[oc] += xv * wrow[oc];
            }
          }
        }
      }
    }
  }
  return pre;
}

Tensor conv2d_forward(const Tensor& x, const Tensor& w, const std::vector<double>& b,
                      const LayerSpec& spec) {
  return activate(conv2d_preactivation(x, w, b, spec), spec.activation);
}

ConvGrads conv2d_backward_cached(const Tensor& x, const Tensor& w, const Tensor& pre,
                                 const Tensor& upstream, const LayerSpec& spec) {
  require(upstream.same_shape(pre), "conv2d_backward: upstream shape " + upstream.shape_str() +
                                        " does not match forward output " + pre.shape_str());
  const int n = x.extent(0), hin = x.extent(1), win = x.extent(2);
  const int cin = x.extent(3), cout = w.extent(3);
  const int hout = pre.extent(1), wout = pre.extent(2);
  const int ph = pad_begin(hin), pw = pad_begin(win);

  ConvGrads g{Tensor(x.shape()), Tensor(w.shape()), std::vector<double>(cout, 0.0)};
  std::vector<double> gpre(cout);
  for (int s = 0; s < n; ++s) {
    for (int oh = 0; oh < hout; ++oh) {
      for (int ow = 0; ow < wout; ++ow) {
        // d(loss)/d(pre) for this output site
        bool any = false;
        for (int oc = 0; oc < cout; ++oc) {
          double gv = upstream.at(s, oh, ow, oc) * activation_grad(pre.at(s, oh, ow, oc), spec.activation);
          gpre[oc] = gv;
          if (gv != 0.0) any = true;
          g.bias[oc] += gv;
        }
        if (!any) continue;
        for (int kh = 0; kh < 3; ++kh) {
          int ih = oh * 2 + kh - ph;
          if (ih < 0 || ih >= hin) continue;
          for (int kw = 0; kw < 3; ++kw) {
            int iw = ow * 2 + kw - pw;
            if (iw < 0 || iw >= win) continue;
            for (int ic = 0; ic < cin; ++ic) {
              double xv = x.at(s, ih, iw, ic);
              std::size_t wbase = ((static_cast<std::size_t>(kh) * 3 + kw) * cin + ic) * cout;
              const double* wrow = w.data() + wbase;
              double* gwrow = g.weights.data() + wbase;
              double gx = 0.0;
              for (int oc = 0; oc < cout; ++oc) {
                gwrow[oc] += xv * gpre[oc];
                gx += wrow[oc] * gpre[oc];
              }
              g.input.at(s, ih, iw, ic) += gx;
            }
          }
        }
      }
    }
  }
  return g;
}

ConvGrads conv2d_backward(const Tensor& x, const Tensor& w, const std::vector<double>& b,
                          const Tensor& upstream, const LayerSpec& spec) {
  Tensor pre = conv2d_preactivation(x, w, b, spec);
  return conv2d_backward_cached(x, w, pre, upstream, spec);
}

Tensor deconv2d_preactivation(const Tensor& x, const Tensor& w, const std::vector<double>& b,
                              const LayerSpec& spec) {
  check_conv_spec(spec, LayerKind::kDeconv2d, "deconv2d");
  require(x.rank() == 4, "deconv2d: input rank must be 4 (NHWC), got " + x.shape_str());
  require(w.rank() == 4 && w.extent(0) == 3 && w.extent(1) == 3,
          "deconv2d: weights must be (3,3,Cout,Cin), got " + w.shape_str());
  require(x.extent(3) == w.extent(3), "deconv2d: input channels " + x.shape_str() +
                                          " do not match weights " + w.shape_str());
  require(static_cast<int>(b.size()) == w.extent(2),
          "deconv2d: bias length " + std::to_string(b.size()) + " does not match filters " +
              std::to_string(w.extent(2)));

  const int n = x.extent(0), hin = x.extent(1), win = x.extent(2);
  const int cin = x.extent(3), cout = w.extent(2);
  const int hout = deconv_out_extent(hin), wout = deconv_out_extent(win);

  // Adjoint of the stride-2 same-padded convolution hout -> hin, whose
  // leading pad is 0 on even extents: output site 2i+kh collects x[i].
  Tensor pre({n, hout, wout, cout});
  for (int s = 0; s < n; ++s) {
    for (int oh = 0; oh < hout; ++oh)
      for (int ow = 0; ow < wout; ++ow)
        for (int oc = 0; oc < cout; ++oc) pre.at(s, oh, ow, oc) = b[oc];
    for (int ih = 0; ih < hin; ++ih) {
      for (int iw = 0; iw < win; ++iw) {
        for (int kh = 0; kh < 3; ++kh) {
          int oh = ih * 2 + kh;
          if (oh >= hout) continue;
          for (int kw = 0; kw < 3; ++kw) {
            int ow = iw * 2 + kw;
            if (ow >= wout) continue;
            double* prow = &pre.at(s, oh, ow, 0);
            for (int ic = 0; ic < cin; ++ic) {
              double xv = x.at(s, ih, iw, ic);
              const double* wrow = w.data() + ((static_cast<std::size_t>(kh) * 3 + kw) * cout) * cin + ic;
              for (int oc = 0; oc < cout; ++oc) prow[oc] += xv * wrow[static_cast<std::size_t>(oc) * cin];
            }
          }
        }
      }
    }
  }
  return pre;
}

Tensor deconv2d_forward(const Tensor& x, const Tensor& w, const std::vector<double>& b,
                        const LayerSpec& spec) {
  return activate(deconv2d_preactivation(x, w, b, spec), spec.activation);
}

ConvGrads deconv2d_backward_cached(const Tensor& x, const Tensor& w, const Tensor& pre,
                                   const Tensor& upstream, const LayerSpec& spec) {
  require(upstream.same_shape(pre), "deconv2d_backward: upstream shape " + upstream.shape_str() +
                                        " does not match forward output " + pre.shape_str());
  const int n = x.extent(0), hin = x.extent(1), win = x.extent(2);
  const int cin = x.extent(3), cout = w.extent(2);
  const int hout = pre.extent(1), wout = pre.extent(2);

  ConvGrads g{Tensor(x.shape()), Tensor(w.shape()), std::vector<double>(cout, 0.0)};
  Tensor gpre(pre.shape());
  for (std::size_t i = 0; i < pre.size(); ++i) {
    gpre[i] = upstream[i] * activation_grad(pre[i], spec.activation);
  }
  for (int s = 0; s < n; ++s) {
    for (int oh = 0; oh < hout; ++oh)
      for (int ow = 0; ow < wout; ++ow)
        for (int oc = 0; oc < cout; ++oc) g.bias[oc] += gpre.at(s, oh, ow, oc);
    for (int ih = 0; ih < hin; ++ih) {
      for (int iw = 0; iw < win; ++iw) {
        for (int kh = 0; kh < 3; ++kh) {
          int oh = ih * 2 + kh;
          if (oh >= hout) continue;
          for (int kw = 0; kw < 3; ++kw) {
            int ow = iw * 2 + kw;
            if (ow >= wout) continue;
            const double* grow = &gpre.at(s, oh, ow, 0);
            for (int ic = 0; ic < cin; ++ic) {
              double xv = x.at(s, ih, iw, ic);
              std::size_t wbase = ((static_cast<std::size_t>(kh) * 3 + kw) * cout) * cin + ic;
              double gx = 0.0;
              for (int oc = 0; oc < cout; ++oc) {
                std::size_t wi = wbase + static_cast<std::size_t>(oc) * cin;
                g.weights[wi] += xv * grow[oc];
                gx += w[wi] * grow[oc];
              }
              g.input.at(s, ih, iw, ic) += gx;
            }
          }
        }
      }
    }
  }
  return g;
}

ConvGrads deconv2d_backward(const Tensor& x, const Tensor& w, const std::vector<double>& b,
                            const Tensor& upstream, const LayerSpec& spec) {
  Tensor pre = deconv2d_preactivation(x, w, b, spec);
  return deconv2d_backward_cached(x, w, pre, upstream, spec);
}

Tensor dense_preactivation(const Tensor& x, const Tensor& w, const std::vector<double>& b) {
  require(x.rank() == 2, "dense: input rank must be 2 (N,F), got " + x.shape_str());
  require(w.rank() == 2, "dense: weights rank must be 2 (Fout,Fin), got " + w.shape_str());
  require(x.extent(1) == w.extent(1), "dense: input width " + x.shape_str() +
                                          " does not match weight columns " + w.shape_str());
  require(static_cast<int>(b.size()) == w.extent(0),
          "dense: bias length " + std::to_string(b.size()) + " does not match rows " +
              std::to_string(w.extent(0)));
  const int n = x.extent(0), fin = x.extent(1), fout = w.extent(0);
  Tensor pre({n, fout});
  for (int s = 0; s < n; ++s) {
    const double* xr = x.data() + static_cast<std::size_t>(s) * fin;
    double* pr = pre.data() + static_cast<std::size_t>(s) * fout;
    for (int o = 0; o < fout; ++o) {
      const double* wr = w.data() + static_cast<std::size_t>(o) * fin;
      double acc = b[o];
      for (int i = 0; i < fin; ++i) acc += wr[i] * xr[i];
      pr[o] = acc;
    }
  }
  return pre;
}

Tensor dense_forward(const Tensor& x, const Tensor& w, const std::vector<double>& b,
                     Activation act) {
  return activate(dense_preactivation(x, w, b), act);
}

ConvGrads dense_backward_cached(const Tensor& x, const Tensor& w, const Tensor& pre,
                                const Tensor& upstream, Activation act) {
  require(upstream.same_shape(pre), "dense_backward: upstream shape " + upstream.shape_str() +
                                        " does not match forward output " + pre.shape_str());
  const int n = x.extent(0), fin = x.extent(1), fout = w.extent(0);
  ConvGrads g{Tensor(x.shape()), Tensor(w.shape()), std::vector<double>(fout, 0.0)};
  for (int s = 0; s < n; ++s) {
    const double* xr = x.data() + static_cast<std::size_t>(s) * fin;
    double* gxr = g.input.data() + static_cast<std::size_t>(s) * fin;
    for (int o = 0; o < fout; ++o) {
      double gv = upstream.data()[static_cast<std::size_t>(s) * fout + o] *
                  activation_grad(pre.data()[static_cast<std::size_t>(s) * fout + o], act);
      if (gv == 0.0) continue;
      g.bias[o] += gv;
      const double* wr = w.data() + static_cast<std::size_t>(o) * fin;
      double* gwr = g.weights.data() + static_cast<std::size_t>(o) * fin;
      for (int i = 0; i < fin; ++i) {
        gwr[i] += gv * xr[i];
        gxr[i] += gv * wr[i];
      }
    }
  }
  return g;
}

ConvGrads dense_backward(const Tensor& x, const Tensor& w, const std::vector<double>& b,
                         const Tensor& upstream, Activation act) {
  Tensor pre = dense_preactivation(x, w, b);
  return dense_backward_cached(x, w, pre, upstream, act);
}

std::vector<double> dense_forward(const std::vector<double>& x, const Tensor& w,
                                  const std::vector<double>& b, Activation act) {
  Tensor xt({1, static_cast<int>(x.size())}, x);
  return dense_forward(xt, w, b, act).vec();
}

void glorot_init(Tensor& w, int fan_in, int fan_out, Rng& rng) {
  double r = std::sqrt(6.0 / (fan_in + fan_out));
  for (auto& v : w.vec()) v = rng.uniform(-r, r);
}

}  // namespace stvae::nn

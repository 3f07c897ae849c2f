#ifndef STVAE_ADAM_HPP
#define STVAE_ADAM_HPP

#include <cstdint>
#include <vector>

namespace stvae::nn {

// Adam with bias correction over one flat parameter vector.
struct AdamState {
  double learning_rate = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  std::int64_t t = 0;
  std::vector<double> m;  // first-moment accumulator
  std::vector<double> v;  // second-moment accumulator

  explicit AdamState(std::size_t n_params, double lr = 1e-4)
      : learning_rate(lr), m(n_params, 0.0), v(n_params, 0.0) {}
};

// One update in place; rejects non-finite gradients.
void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state);

}  // namespace stvae::nn

#endif

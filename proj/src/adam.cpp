#include "stvae/adam.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace stvae::nn {

void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state) {
  if (params.size() != grads.size() || params.size() != state.m.size() ||
      params.size() != state.v.size()) {
    throw std::invalid_argument("adam_step: size mismatch (params " + std::to_string(params.size()) +
                                ", grads " + std::to_string(grads.size()) + ", state " +
                                std::to_string(state.m.size()) + ")");
  }
  for (std::size_t i = 0; i < grads.size(); ++i) {
    if (!std::isfinite(grads[i])) {
      throw std::runtime_error("adam_step: non-finite gradient at index " + std::to_string(i));
    }
  }
  state.t += 1;
  const double b1t = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double b2t = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < params.size(); ++i) {
    state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grads[i];
    state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grads[i] * grads[i];
    double mhat = state.m[i] / b1t;
    double vhat = state.v[i] / b2t;
    params[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
  }
}

}  // namespace stvae::nn

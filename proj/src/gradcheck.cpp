#include "stvae/gradcheck.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace stvae::nn {

std::vector<double> finite_difference_gradient(
    const std::function<double(const std::vector<double>&)>& loss_fn,
    const std::vector<double>& params, double step) {
  if (step <= 0.0) throw std::invalid_argument("finite_difference_gradient: step must be > 0");
  std::vector<double> p = params;
  std::vector<double> grads(params.size());
  for (std::size_t i = 0; i < params.size(); ++i) {
    double saved = p[i];
    p[i] = saved + step;
    double up = loss_fn(p);
    p[i] = saved - step;
    double down = loss_fn(p);
    p[i] = saved;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw std::runtime_error("finite_difference_gradient: non-finite loss at coordinate " +
                               std::to_string(i));
    }
    grads[i] = (up - down) / (2.0 * step);
  }
  return grads;
}

double relative_error(double a, double b, double floor) {
  double scale = std::max({std::fabs(a), std::fabs(b), floor});
  return std::fabs(a - b) / scale;
}

}  // namespace stvae::nn

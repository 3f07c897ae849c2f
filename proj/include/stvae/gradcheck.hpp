#ifndef STVAE_GRADCHECK_HPP
#define STVAE_GRADCHECK_HPP

#include <functional>
#include <vector>

namespace stvae::nn {

// Central finite differences (f(p+e) - f(p-e)) / (2*step) per coordinate.
// The reference oracle for every analytic gradient in this project.
std::vector<double> finite_difference_gradient(
    const std::function<double(const std::vector<double>&)>& loss_fn,
    const std::vector<double>& params, double step);

// Relative agreement used by the gradient checks: |a-b| scaled by the
// larger magnitude with a small absolute floor.
double relative_error(double a, double b, double floor = 1e-6);

}  // namespace stvae::nn

#endif

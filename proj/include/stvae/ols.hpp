#ifndef STVAE_OLS_HPP
#define STVAE_OLS_HPP

#include <vector>

namespace stvae::forecast {

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_se = 0.0;  // sqrt(SSE/(n-2)); exactly 0 when n == 2
  int n = 0;

  double predict(double t) const { return intercept + slope * t; }
};

// Closed-form least squares; rejects fewer than 2 points or constant times.
LinearFit ols_fit(const std::vector<double>& times, const std::vector<double>& values);

}  // namespace stvae::forecast

#endif

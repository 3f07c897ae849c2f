#include "stvae/ols.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace stvae::forecast {

LinearFit ols_fit(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) {
    throw std::invalid_argument("ols_fit: " + std::to_string(times.size()) + " times vs " +
                                std::to_string(values.size()) + " values");
  }
  const int n = static_cast<int>(times.size());
  if (n < 2) throw std::invalid_argument("ols_fit: need at least 2 points, got " + std::to_string(n));

  double tbar = 0.0, ybar = 0.0;
  for (int i = 0; i < n; ++i) {
    tbar += times[i];
    ybar += values[i];
  }
  tbar /= n;
  ybar /= n;
  double stt = 0.0, sty = 0.0;
  for (int i = 0; i < n; ++i) {
    double dt = times[i] - tbar;
    stt += dt * dt;
    sty += dt * (values[i] - ybar);
  }
  if (stt <= 0.0) {
    throw std::invalid_argument("ols_fit: times are all equal; slope undefined");
  }

  LinearFit fit;
  fit.n = n;
  fit.slope = sty / stt;
  fit.intercept = ybar - fit.slope * tbar;
  if (n > 2) {
    double sse = 0.0;
    for (int i = 0; i < n; ++i) {
      double r = values[i] - fit.predict(times[i]);
      sse += r * r;
    }
    fit.residual_se = std::sqrt(std::max(0.0, sse) / (n - 2));
  }
  return fit;
}

}  // namespace stvae::forecast

#ifndef STVAE_FORECAST_HPP
#define STVAE_FORECAST_HPP

#include <vector>

#include "stvae/field.hpp"
#include "stvae/ols.hpp"
#include "stvae/vae.hpp"

namespace stvae::forecast {

struct PwPrediction {
  // One mask-ordered value vector per requested horizon time.
  std::vector<std::vector<double>> predicted;
  std::vector<LinearFit> fits;  // per location, canonical mask order
};

// Independent OLS per informative location, extrapolated to each horizon
// time. Visit times are the regression abscissa.
PwPrediction pw_fit_predict(const Series& series, const std::vector<double>& horizon_times);

// Stage one of the two-stage method: encode every visit with the model
// (pad + normalize with the model's bounds first), then fit one line per
// latent dimension against the visit times.
std::vector<LinearFit> latent_trajectory_fit(const vae::VaeModel& model, const Series& series,
                                             const Mask& mask);

struct TwoStagePrediction {
  std::vector<std::vector<double>> predicted;  // raw units, mask order, per horizon
  std::vector<LinearFit> fits;                 // per latent dimension
};

// Extrapolate the fitted latent lines to each horizon time and decode;
// predictions are de-noised decoder means.
TwoStagePrediction two_stage_predict(const vae::VaeModel& model, const Series& series,
                                     const Mask& mask, const std::vector<double>& horizon_times);

// Encode then decode each visit: the de-noised reconstruction of a series,
// in raw units.
std::vector<std::vector<double>> reconstruct_series(const vae::VaeModel& model,
                                                    const Series& series, const Mask& mask);

}  // namespace stvae::forecast

#endif

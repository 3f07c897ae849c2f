#include "stvae/forecast.hpp"

#include <stdexcept>

namespace stvae::forecast {

PwPrediction pw_fit_predict(const Series& series, const std::vector<double>& horizon_times) {
  if (series.n_visits() < 2) {
    throw std::invalid_argument("pw_fit_predict: series '" + series.id +
                                "' needs at least 2 visits");
  }
  const int m = static_cast<int>(series.visits[0].size());
  PwPrediction out;
  out.fits.reserve(m);
  std::vector<double> values(series.n_visits());
  for (int loc = 0; loc < m; ++loc) {
    for (int t = 0; t < series.n_visits(); ++t) values[t] = series.visits[t][loc];
    out.fits.push_back(ols_fit(series.times, values));
  }
  out.predicted.reserve(horizon_times.size());
  for (double ht : horizon_times) {
    std::vector<double> pred(m);
    for (int loc = 0; loc < m; ++loc) pred[loc] = out.fits[loc].predict(ht);
    out.predicted.push_back(std::move(pred));
  }
  return out;
}

std::vector<LinearFit> latent_trajectory_fit(const vae::VaeModel& model, const Series& series,
                                             const Mask& mask) {
  if (series.n_visits() < 2) {
    throw std::invalid_argument("latent_trajectory_fit: series '" + series.id +
                                "' needs at least 2 visits");
  }
  Bounds bounds{model.norm_lower, model.norm_upper};
  const int k = model.arch.latent_dim;
  std::vector<std::vector<double>> codes;
  codes.reserve(series.n_visits());
  for (const auto& visit : series.visits) {
    codes.push_back(vae::encode(model, pad_and_normalize(visit, mask, bounds)));
  }
  std::vector<LinearFit> fits;
  fits.reserve(k);
  std::vector<double> dim_values(series.n_visits());
  for (int d = 0; d < k; ++d) {
    for (int t = 0; t < series.n_visits(); ++t) dim_values[t] = codes[t][d];
    fits.push_back(ols_fit(series.times, dim_values));
  }
  return fits;
}

TwoStagePrediction two_stage_predict(const vae::VaeModel& model, const Series& series,
                                     const Mask& mask, const std::vector<double>& horizon_times) {
  TwoStagePrediction out;
  out.fits = latent_trajectory_fit(model, series, mask);
  Bounds bounds{model.norm_lower, model.norm_upper};
  const int k = model.arch.latent_dim;
  out.predicted.reserve(horizon_times.size());
  std::vector<double> code(k);
  for (double ht : horizon_times) {
    for (int d = 0; d < k; ++d) code[d] = out.fits[d].predict(ht);
    out.predicted.push_back(denormalize_grid(vae::decode(model, code), mask, bounds));
  }
  return out;
}

std::vector<std::vector<double>> reconstruct_series(const vae::VaeModel& model,
                                                    const Series& series, const Mask& mask) {
  Bounds bounds{model.norm_lower, model.norm_upper};
  std::vector<std::vector<double>> out;
  out.reserve(series.n_visits());
  for (const auto& visit : series.visits) {
    auto grid = pad_and_normalize(visit, mask, bounds);
    out.push_back(denormalize_grid(vae::decode(model, vae::encode(model, grid)), mask, bounds));
  }
  return out;
}

}  // namespace stvae::forecast

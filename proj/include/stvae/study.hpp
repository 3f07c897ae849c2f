#ifndef STVAE_STUDY_HPP
#define STVAE_STUDY_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "stvae/field.hpp"
#include "stvae/generators.hpp"
#include "stvae/gibbs.hpp"
#include "stvae/vae_train.hpp"

namespace stvae::study {

struct StudyConfig {
  std::vector<gen::GeneratorKind> generators = {gen::GeneratorKind::kSt, gen::GeneratorKind::kPw,
                                                gen::GeneratorKind::kVae};
  std::vector<int> visit_counts = {3, 8};
  int test_series = 500;
  std::vector<int> vae_training_sizes = {500, 1000, 5000, 10000};
  int horizon = 3;  // visits into the future for the prediction metric
  std::uint64_t seed = 0;
  int threads = 0;  // 0: STVAE_THREADS env or hardware count

  vae::TrainConfig train;
  vae::MmdConfig mmd;
  int latent_dim = 8;
  car::McmcConfig mcmc;

  // vae-generator bootstrap: a seed VAE trained on ST data whose latent
  // class means (field-severity tertiles) centre the generator's intercepts.
  int bootstrap_series = 500;
  int bootstrap_visits = 8;

  // Headroom added above the training-split max when fixing normalization
  // bounds, as a fraction of the observed range (simulated data is unbounded
  // above, unlike instrument readings).
  double normalization_headroom = 0.25;

  static StudyConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static StudyConfig load(const std::string& path);
};

struct SimRow {
  std::string generator;
  int visits = 0;
  std::string method;
  std::string series_id;
  double rse = 0.0;
  double mae = 0.0;
  bool ok = true;
  std::string error;
};

struct SimReport {
  std::vector<SimRow> rows;
  std::vector<std::string> methods;  // column order used in reports

  std::vector<double> collect(const std::string& generator, int visits,
                              const std::string& method, bool want_mae) const;
};

// The full simulation study: per (generator x T) cell, generate test series,
// train one VAE per training size, fit ST and PW per test series, and score
// every method by residual standard error and horizon-MAE. Writes
// simulation_study.csv, boxplot SVGs and a manifest under out_dir.
SimReport run_simulation_study(const StudyConfig& config, const std::string& out_dir);

struct PredictionStudyConfig {
  std::string dataset_path;  // when set, evaluated as-is (no generation)
  gen::GeneratorKind generator = gen::GeneratorKind::kVae;
  int n_series = 100;
  int min_visits = 4;
  int max_visits = 13;
  std::vector<int> base_visits = {3, 5, 8};
  int max_horizon = 5;

  std::string model_path;  // when set, used instead of training
  int train_series = 500;
  int train_visits = 8;

  std::uint64_t seed = 0;
  int threads = 0;
  vae::TrainConfig train;
  vae::MmdConfig mmd;
  int latent_dim = 8;
  car::McmcConfig mcmc;
  int bootstrap_series = 300;
  int bootstrap_visits = 8;
  double normalization_headroom = 0.25;

  static PredictionStudyConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
  static PredictionStudyConfig load(const std::string& path);
};

struct PredRow {
  int base = 0;     // visits used for fitting
  int horizon = 0;  // visits ahead of the base
  std::string method;
  std::string series_id;
  std::string label;  // class label or "" when none
  double mae = 0.0;
  bool ok = true;
  std::string error;
};

struct PredCell {
  int base = 0;
  int horizon = 0;
  std::string method;
  std::string label;  // "all" or a class label
  int included = 0;
  double mae_mean = 0.0;
};

struct PredReport {
  std::vector<PredRow> rows;
  std::vector<PredCell> cells;
};

// The visit-protocol study: for each base visit count b and horizon j,
// include the series with at least b+j visits, predict visit b+j from the
// first b, and grid the MAE by method (overall and per class label).
PredReport run_prediction_study(const PredictionStudyConfig& config, const std::string& out_dir);

// Latent class means by field-severity tertiles; used to parameterize the
// vae generator from a trained model and a labeled-by-severity dataset.
struct BootstrapGenerator {
  vae::VaeModel model;
  std::vector<std::vector<double>> class_means;  // glaucoma, suspect, healthy order
  std::vector<std::string> class_labels;
};
BootstrapGenerator bootstrap_vae_generator(const StudyConfig& config, const Mask& mask,
                                           std::uint64_t seed);

// Normalization bounds from a training split: lower fixed at the padding
// constant, upper = split max plus headroom.
Bounds bounds_from_fields(const std::vector<const Series*>& series, double headroom);

void write_manifest(const std::string& path, const nlohmann::json& manifest);

}  // namespace stvae::study

#endif

#include "stvae/study.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

#include "stvae/dataset_io.hpp"
#include "stvae/forecast.hpp"
#include "stvae/io_util.hpp"
#include "stvae/metrics.hpp"
#include "stvae/parallel.hpp"
#include "stvae/split.hpp"
#include "stvae/svg_plot.hpp"
#include "stvae/vae_io.hpp"
#include "stvae/version.hpp"

namespace stvae::study {

using nlohmann::json;

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  return out + "\"";
}

std::string method_name(int training_size) {
  if (training_size >= 1000 && training_size % 1000 == 0) {
    return "VAE-" + std::to_string(training_size / 1000) + "k";
  }
  return "VAE-" + std::to_string(training_size);
}

Series slice_series(const Series& s, int visits) {
  Series out;
  out.id = s.id;
  out.label = s.label;
  out.truth = s.truth;
  out.times.assign(s.times.begin(), s.times.begin() + visits);
  out.visits.assign(s.visits.begin(), s.visits.begin() + visits);
  return out;
}

std::vector<gen::GeneratorKind> kinds_from_json(const json& arr) {
  std::vector<gen::GeneratorKind> out;
  for (const auto& v : arr) out.push_back(gen::generator_kind_from_string(v.get<std::string>()));
  return out;
}

json kinds_to_json(const std::vector<gen::GeneratorKind>& kinds) {
  json arr = json::array();
  for (auto k : kinds) arr.push_back(gen::to_string(k));
  return arr;
}

void read_train(const json& j, vae::TrainConfig& t) {
  t.epochs = j.value("epochs", t.epochs);
  t.batch_size = j.value("batch_size", t.batch_size);
  t.learning_rate = j.value("learning_rate", t.learning_rate);
}

json train_to_json(const vae::TrainConfig& t) {
  return {{"epochs", t.epochs}, {"batch_size", t.batch_size}, {"learning_rate", t.learning_rate}};
}

void read_mmd(const json& j, vae::MmdConfig& m) {
  m.tau2 = j.value("tau2", m.tau2);
  m.lambda = j.value("lambda", m.lambda);
  m.prior_samples = j.value("prior_samples", m.prior_samples);
  m.unbiased = j.value("unbiased", m.unbiased);
}

json mmd_to_json(const vae::MmdConfig& m) {
  return {{"tau2", m.tau2},
          {"lambda", m.lambda},
          {"prior_samples", m.prior_samples},
          {"unbiased", m.unbiased}};
}

void read_mcmc(const json& j, car::McmcConfig& m) {
  m.iterations = j.value("iterations", m.iterations);
  m.burn_in = j.value("burn_in", m.burn_in);
  m.thinning = j.value("thinning", m.thinning);
  m.rho_step = j.value("rho_step", m.rho_step);
}

json mcmc_to_json(const car::McmcConfig& m) {
  return {{"iterations", m.iterations},
          {"burn_in", m.burn_in},
          {"thinning", m.thinning},
          {"rho_step", m.rho_step}};
}

// Normalized training fields for every visit of every series, dropping the
// (rare) simulated fields that fall outside the bounds.
std::vector<std::vector<double>> normalized_fields(const std::vector<const Series*>& series,
                                                   const Mask& mask, const Bounds& bounds,
                                                   int* dropped = nullptr) {
  std::vector<std::vector<double>> fields;
  int bad = 0;
  for (const Series* s : series) {
    for (const auto& visit : s->visits) {
      bool in_range = true;
      for (double v : visit) {
        if (v < bounds.lower || v > bounds.upper) {
          in_range = false;
          break;
        }
      }
      if (!in_range) {
        ++bad;
        continue;
      }
      fields.push_back(pad_and_normalize(visit, mask, bounds));
    }
  }
  if (dropped) *dropped = bad;
  return fields;
}

std::vector<const Series*> series_ptrs(const Dataset& d) {
  std::vector<const Series*> out;
  out.reserve(d.series.size());
  for (const auto& s : d.series) out.push_back(&s);
  return out;
}

struct TrainedVae {
  vae::VaeModel model;
  std::vector<vae::EpochStats> history;
  int best_epoch = 0;
  int dropped_fields = 0;
};

TrainedVae train_vae_on_dataset(const Dataset& data, const StudyConfig& config,
                                std::uint64_t seed) {
  SplitResult split = split_patients(data, {0.8, 0.1, 0.1}, derive_seed(seed, "split"));
  if (split.train.series.empty() || split.validation.series.empty()) {
    throw std::runtime_error("vae training: empty train or validation split");
  }
  Bounds bounds = bounds_from_fields(series_ptrs(split.train), config.normalization_headroom);

  TrainedVae out;
  int dropped_train = 0, dropped_val = 0;
  auto train_fields =
      normalized_fields(series_ptrs(split.train), data.mask, bounds, &dropped_train);
  auto val_fields =
      normalized_fields(series_ptrs(split.validation), data.mask, bounds, &dropped_val);
  if (train_fields.empty() || val_fields.empty()) {
    throw std::runtime_error("vae training: no usable fields after range filtering");
  }

  vae::VaeArch arch;
  arch.latent_dim = config.latent_dim;
  arch.extent = data.mask.rows;
  vae::VaeModel model = vae::VaeModel::init(arch, seed);
  model.norm_lower = bounds.lower;
  model.norm_upper = bounds.upper;

  vae::TrainConfig tc = config.train;
  tc.seed = seed;
  vae::TrainResult res = vae::train(std::move(model), train_fields, val_fields, tc, config.mmd);
  out.model = std::move(res.model);
  out.history = std::move(res.history);
  out.best_epoch = res.best_epoch;
  out.dropped_fields = dropped_train + dropped_val;
  return out;
}

struct MethodScores {
  double rse = std::numeric_limits<double>::quiet_NaN();
  double mae = std::numeric_limits<double>::quiet_NaN();
};

MethodScores eval_pw(const Series& observed, const std::vector<double>& truth,
                     double target_time) {
  auto pred = forecast::pw_fit_predict(observed, {target_time});
  const int m = static_cast<int>(observed.visits[0].size());
  std::vector<double> residuals;
  residuals.reserve(static_cast<std::size_t>(m) * observed.n_visits());
  for (int t = 0; t < observed.n_visits(); ++t) {
    for (int loc = 0; loc < m; ++loc) {
      residuals.push_back(observed.visits[t][loc] - pred.fits[loc].predict(observed.times[t]));
    }
  }
  MethodScores s;
  s.rse = residual_standard_error(residuals, 2 * m);
  s.mae = mae_values(pred.predicted[0], truth);
  return s;
}

MethodScores eval_two_stage(const vae::VaeModel& model, const Mask& mask, const Series& observed,
                            const std::vector<double>& truth, double target_time) {
  std::vector<double> horizons = observed.times;
  horizons.push_back(target_time);
  auto pred = forecast::two_stage_predict(model, observed, mask, horizons);
  std::vector<double> residuals;
  const int m = static_cast<int>(observed.visits[0].size());
  residuals.reserve(static_cast<std::size_t>(m) * observed.n_visits());
  for (int t = 0; t < observed.n_visits(); ++t) {
    for (int loc = 0; loc < m; ++loc) {
      residuals.push_back(observed.visits[t][loc] - pred.predicted[t][loc]);
    }
  }
  MethodScores s;
  s.rse = residual_standard_error(residuals, 2 * model.arch.latent_dim);
  s.mae = mae_values(pred.predicted.back(), truth);
  return s;
}

MethodScores eval_st(const car::Adjacency& adj, const Series& observed,
                     const std::vector<double>& truth, int horizon, const car::McmcConfig& mcmc) {
  const int t_obs = observed.n_visits();
  const int m = static_cast<int>(observed.visits[0].size());
  Eigen::MatrixXd x(t_obs, m);
  for (int t = 0; t < t_obs; ++t) {
    for (int loc = 0; loc < m; ++loc) x(t, loc) = observed.visits[t][loc];
  }
  car::McmcConfig cfg = mcmc;
  cfg.store_phi = false;
  car::CarPosterior post = car::gibbs_fit(x, adj, cfg);
  Eigen::MatrixXd fit = car::posterior_mean_fit(post);
  std::vector<double> residuals;
  residuals.reserve(static_cast<std::size_t>(m) * t_obs);
  for (int t = 0; t < t_obs; ++t) {
    for (int loc = 0; loc < m; ++loc) residuals.push_back(x(t, loc) - fit(t, loc));
  }
  car::StForecast fc = car::forecast_st(post, adj, horizon, derive_seed(cfg.seed, "fc"));
  std::vector<double> pred(m);
  for (int loc = 0; loc < m; ++loc) pred[loc] = fc.mean[horizon - 1][loc];
  MethodScores s;
  s.rse = residual_standard_error(residuals, 0);
  s.mae = mae_values(pred, truth);
  return s;
}

void write_sim_csv(const std::string& path, const SimReport& report) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open report for writing: " + path);
  f << "generator,visits,method,series_id,rse,mae,status,error\n";
  for (const auto& r : report.rows) {
    f << r.generator << "," << r.visits << "," << r.method << "," << r.series_id << ","
      << fmt_double(r.rse) << "," << fmt_double(r.mae) << "," << (r.ok ? "ok" : "failed") << ","
      << csv_escape(r.error) << "\n";
  }
  if (!f) throw std::runtime_error("failed writing report: " + path);
}

}  // namespace

Bounds bounds_from_fields(const std::vector<const Series*>& series, double headroom) {
  double max_v = -std::numeric_limits<double>::infinity();
  for (const Series* s : series) {
    for (const auto& visit : s->visits) {
      for (double v : visit) max_v = std::max(max_v, v);
    }
  }
  if (!std::isfinite(max_v)) throw std::invalid_argument("bounds_from_fields: no fields");
  Bounds b;
  b.lower = kPadValue;
  max_v = std::max(max_v, b.lower + 1.0);
  b.upper = max_v + headroom * (max_v - b.lower);
  return b;
}

StudyConfig StudyConfig::from_json(const json& j) {
  StudyConfig c;
  if (j.contains("generators")) c.generators = kinds_from_json(j.at("generators"));
  if (j.contains("visit_counts")) c.visit_counts = j.at("visit_counts").get<std::vector<int>>();
  c.test_series = j.value("test_series", c.test_series);
  if (j.contains("vae_training_sizes")) {
    c.vae_training_sizes = j.at("vae_training_sizes").get<std::vector<int>>();
  }
  c.horizon = j.value("horizon", c.horizon);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  c.latent_dim = j.value("latent_dim", c.latent_dim);
  if (j.contains("train")) read_train(j.at("train"), c.train);
  if (j.contains("mmd")) read_mmd(j.at("mmd"), c.mmd);
  if (j.contains("mcmc")) read_mcmc(j.at("mcmc"), c.mcmc);
  c.bootstrap_series = j.value("bootstrap_series", c.bootstrap_series);
  c.bootstrap_visits = j.value("bootstrap_visits", c.bootstrap_visits);
  c.normalization_headroom = j.value("normalization_headroom", c.normalization_headroom);
  return c;
}

json StudyConfig::to_json() const {
  return {{"generators", kinds_to_json(generators)},
          {"visit_counts", visit_counts},
          {"test_series", test_series},
          {"vae_training_sizes", vae_training_sizes},
          {"horizon", horizon},
          {"seed", seed},
          {"threads", threads},
          {"latent_dim", latent_dim},
          {"train", train_to_json(train)},
          {"mmd", mmd_to_json(mmd)},
          {"mcmc", mcmc_to_json(mcmc)},
          {"bootstrap_series", bootstrap_series},
          {"bootstrap_visits", bootstrap_visits},
          {"normalization_headroom", normalization_headroom}};
}

StudyConfig StudyConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open study config: " + path);
  json j;
  try {
    f >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("study config " + path + ": " + e.what());
  }
  return from_json(j);
}

std::vector<double> SimReport::collect(const std::string& generator, int visits,
                                       const std::string& method, bool want_mae) const {
  std::vector<double> out;
  for (const auto& r : rows) {
    if (r.ok && r.generator == generator && r.visits == visits && r.method == method) {
      out.push_back(want_mae ? r.mae : r.rse);
    }
  }
  return out;
}

BootstrapGenerator bootstrap_vae_generator(const StudyConfig& config, const Mask& mask,
                                           std::uint64_t seed) {
  gen::GeneratorSpec spec;
  spec.kind = gen::GeneratorKind::kSt;
  spec.n_series = config.bootstrap_series;
  spec.visits = config.bootstrap_visits;
  spec.seed = derive_seed(seed, "bootstrap-data");
  spec.id_prefix = "boot";
  Dataset data = gen::generate_dataset(spec, mask);

  TrainedVae trained = train_vae_on_dataset(data, config, derive_seed(seed, "bootstrap-train"));

  // Severity = mean field value over all visits and informative cells;
  // tertiles stand in for the clinical classes (low = glaucoma-like).
  std::vector<std::pair<double, int>> severity;
  severity.reserve(data.series.size());
  for (std::size_t i = 0; i < data.series.size(); ++i) {
    double acc = 0.0;
    std::size_t cnt = 0;
    for (const auto& visit : data.series[i].visits) {
      acc = std::accumulate(visit.begin(), visit.end(), acc);
      cnt += visit.size();
    }
    severity.emplace_back(acc / static_cast<double>(cnt), static_cast<int>(i));
  }
  std::sort(severity.begin(), severity.end());

  BootstrapGenerator boot;
  boot.model = trained.model;
  boot.class_labels = {"glaucoma", "suspect", "healthy"};
  boot.class_means.assign(3, std::vector<double>(config.latent_dim, 0.0));
  Bounds bounds{boot.model.norm_lower, boot.model.norm_upper};
  const std::size_t n = severity.size();
  std::vector<long> counts(3, 0);
  for (std::size_t rank = 0; rank < n; ++rank) {
    int cls = static_cast<int>(rank * 3 / n);
    const Series& s = data.series[severity[rank].second];
    for (const auto& visit : s.visits) {
      bool in_range = true;
      for (double v : visit) {
        if (v < bounds.lower || v > bounds.upper) in_range = false;
      }
      if (!in_range) continue;
      auto code = vae::encode(boot.model, pad_and_normalize(visit, mask, bounds));
      for (int d = 0; d < config.latent_dim; ++d) boot.class_means[cls][d] += code[d];
      ++counts[cls];
    }
  }
  for (int cls = 0; cls < 3; ++cls) {
    if (counts[cls] == 0) throw std::runtime_error("bootstrap: empty severity class");
    for (auto& v : boot.class_means[cls]) v /= static_cast<double>(counts[cls]);
  }
  return boot;
}

SimReport run_simulation_study(const StudyConfig& config, const std::string& out_dir) {
  if (config.test_series < 1) throw std::invalid_argument("study: test_series must be >= 1");
  if (config.horizon < 1) throw std::invalid_argument("study: horizon must be >= 1");
  std::filesystem::create_directories(out_dir);
  const Mask& mask = Mask::standard24_2();
  const car::Adjacency adj = car::build_adjacency(mask);
  const int threads = resolve_threads(config.threads);

  SimReport report;
  report.methods = {"ST", "PW"};
  for (int size : config.vae_training_sizes) report.methods.push_back(method_name(size));

  bool needs_bootstrap = false;
  for (auto g : config.generators) {
    if (g == gen::GeneratorKind::kVae) needs_bootstrap = true;
  }
  std::unique_ptr<BootstrapGenerator> boot;
  if (needs_bootstrap) {
    boot = std::make_unique<BootstrapGenerator>(
        bootstrap_vae_generator(config, mask, derive_seed(config.seed, "bootstrap")));
    // Latent scatter of the bootstrap data by severity class (first two dims).
    Bounds bb{boot->model.norm_lower, boot->model.norm_upper};
    gen::GeneratorSpec spec;
    spec.kind = gen::GeneratorKind::kSt;
    spec.n_series = std::min(config.bootstrap_series, 150);
    spec.visits = config.bootstrap_visits;
    spec.seed = derive_seed(derive_seed(config.seed, "bootstrap"), "bootstrap-data");
    spec.id_prefix = "boot";
    Dataset bd = gen::generate_dataset(spec, mask);
    std::vector<std::pair<double, int>> severity;
    for (std::size_t i = 0; i < bd.series.size(); ++i) {
      double acc = 0.0;
      std::size_t cnt = 0;
      for (const auto& visit : bd.series[i].visits) {
        acc = std::accumulate(visit.begin(), visit.end(), acc);
        cnt += visit.size();
      }
      severity.emplace_back(acc / static_cast<double>(cnt), static_cast<int>(i));
    }
    std::sort(severity.begin(), severity.end());
    std::vector<svg::ScatterSeries> scat(3);
    scat[0].label = "glaucoma";
    scat[1].label = "suspect";
    scat[2].label = "healthy";
    const std::size_t n = severity.size();
    for (std::size_t rank = 0; rank < n; ++rank) {
      int cls = static_cast<int>(rank * 3 / n);
      const Series& s = bd.series[severity[rank].second];
      for (const auto& visit : s.visits) {
        bool ok = true;
        for (double v : visit) {
          if (v < bb.lower || v > bb.upper) ok = false;
        }
        if (!ok) continue;
        auto code = vae::encode(boot->model, pad_and_normalize(visit, mask, bb));
        scat[cls].points.emplace_back(code[0], code[1]);
      }
    }
    svg::save_scatter(out_dir + "/latent_scatter.svg", scat,
                      "Latent space by severity class (bootstrap data)", "latent dim 1",
                      "latent dim 2");
  }

  for (auto g : config.generators) {
    const std::string gname = gen::to_string(g);
    for (int T : config.visit_counts) {
      std::uint64_t cell_seed =
          derive_seed(config.seed, "cell-" + gname + "-" + std::to_string(T));

      gen::GeneratorSpec test_spec;
      test_spec.kind = g;
      test_spec.n_series = config.test_series;
      test_spec.visits = T + config.horizon;  // trailing visits are the held-out truth
      test_spec.seed = derive_seed(cell_seed, "test");
      test_spec.id_prefix = gname + std::to_string(T) + "-";
      if (g == gen::GeneratorKind::kVae) {
        test_spec.decoder = &boot->model;
        test_spec.class_means = boot->class_means;
        test_spec.class_labels = boot->class_labels;
      }
      Dataset test = gen::generate_dataset(test_spec, mask);

      std::vector<std::pair<std::string, vae::VaeModel>> vae_models;
      for (int size : config.vae_training_sizes) {
        gen::GeneratorSpec tr_spec = test_spec;
        tr_spec.n_series = size;
        tr_spec.visits = T;
        tr_spec.seed = derive_seed(cell_seed, "train-" + std::to_string(size));
        tr_spec.id_prefix = "tr-";
        Dataset tr = gen::generate_dataset(tr_spec, mask);
        TrainedVae trained = train_vae_on_dataset(
            tr, config, derive_seed(cell_seed, "vae-" + std::to_string(size)));
        vae::save_model_file(out_dir + "/vae_" + gname + "_T" + std::to_string(T) + "_" +
                                 std::to_string(size) + ".json",
                             trained.model, trained.history, trained.best_epoch);
        vae_models.emplace_back(method_name(size), std::move(trained.model));
      }

      const int n_methods = 2 + static_cast<int>(vae_models.size());
      std::vector<std::vector<SimRow>> slots(test.series.size());
      parallel_for(static_cast<int>(test.series.size()), threads, [&](int i) {
        const Series& full = test.series[i];
        Series observed = slice_series(full, T);
        const std::vector<double>& truth = full.visits[T + config.horizon - 1];
        const double target_time = full.times[T + config.horizon - 1];
        auto& rows = slots[i];
        rows.reserve(n_methods);

        auto push = [&](const std::string& method, auto&& fn) {
          SimRow row;
          row.generator = gname;
          row.visits = T;
          row.method = method;
          row.series_id = full.id;
          try {
            MethodScores s = fn();
            row.rse = s.rse;
            row.mae = s.mae;
          } catch (const std::exception& e) {
            row.ok = false;
            row.error = e.what();
          }
          rows.push_back(std::move(row));
        };

        push("ST", [&] {
          car::McmcConfig mc = config.mcmc;
          mc.seed = derive_seed(cell_seed, "st-" + std::to_string(i));
          return eval_st(adj, observed, truth, config.horizon, mc);
        });
        push("PW", [&] { return eval_pw(observed, truth, target_time); });
        for (const auto& [name, model] : vae_models) {
          push(name, [&] { return eval_two_stage(model, mask, observed, truth, target_time); });
        }
      });
      for (auto& rows : slots) {
        for (auto& r : rows) report.rows.push_back(std::move(r));
      }
    }
  }

  write_sim_csv(out_dir + "/simulation_study.csv", report);

  // Boxplot grids mirroring the study layout: rows = generator, cols = T.
  for (bool want_mae : {false, true}) {
    std::vector<std::vector<svg::BoxPanel>> panels;
    for (auto g : config.generators) {
      std::vector<svg::BoxPanel> row;
      for (int T : config.visit_counts) {
        svg::BoxPanel panel;
        panel.title = gen::to_string(g) + " data, T=" + std::to_string(T);
        for (const auto& method : report.methods) {
          panel.groups.push_back(
              {method, report.collect(gen::to_string(g), T, method, want_mae)});
        }
        row.push_back(std::move(panel));
      }
      panels.push_back(std::move(row));
    }
    svg::save_boxplot_grid(out_dir + (want_mae ? "/simulation_mae.svg" : "/simulation_rse.svg"),
                           panels,
                           want_mae ? "Prediction error (MAE, horizon " +
                                          std::to_string(config.horizon) + ")"
                                    : "Residual standard error",
                           want_mae ? "MAE" : "RSE");
  }

  json manifest = {{"command", "study-sim"},
                   {"config", config.to_json()},
                   {"tool_version", kToolVersion},
                   {"format_versions",
                    {{"dataset", kDatasetFormatVersion}, {"model", vae::kModelFormatVersion}}},
                   {"outputs", {"simulation_study.csv", "simulation_rse.svg", "simulation_mae.svg"}}};
  write_manifest(out_dir + "/manifest.json", manifest);
  return report;
}

PredictionStudyConfig PredictionStudyConfig::from_json(const json& j) {
  PredictionStudyConfig c;
  c.dataset_path = j.value("dataset_path", c.dataset_path);
  if (j.contains("generator")) {
    c.generator = gen::generator_kind_from_string(j.at("generator").get<std::string>());
  }
  c.n_series = j.value("n_series", c.n_series);
  c.min_visits = j.value("min_visits", c.min_visits);
  c.max_visits = j.value("max_visits", c.max_visits);
  if (j.contains("base_visits")) c.base_visits = j.at("base_visits").get<std::vector<int>>();
  c.max_horizon = j.value("max_horizon", c.max_horizon);
  c.model_path = j.value("model_path", c.model_path);
  c.train_series = j.value("train_series", c.train_series);
  c.train_visits = j.value("train_visits", c.train_visits);
  c.seed = j.value("seed", c.seed);
  c.threads = j.value("threads", c.threads);
  if (j.contains("train")) read_train(j.at("train"), c.train);
  if (j.contains("mmd")) read_mmd(j.at("mmd"), c.mmd);
  if (j.contains("mcmc")) read_mcmc(j.at("mcmc"), c.mcmc);
  c.latent_dim = j.value("latent_dim", c.latent_dim);
  c.bootstrap_series = j.value("bootstrap_series", c.bootstrap_series);
  c.bootstrap_visits = j.value("bootstrap_visits", c.bootstrap_visits);
  c.normalization_headroom = j.value("normalization_headroom", c.normalization_headroom);
  return c;
}

json PredictionStudyConfig::to_json() const {
  return {{"dataset_path", dataset_path},
          {"generator", gen::to_string(generator)},
          {"n_series", n_series},
          {"min_visits", min_visits},
          {"max_visits", max_visits},
          {"base_visits", base_visits},
          {"max_horizon", max_horizon},
          {"model_path", model_path},
          {"train_series", train_series},
          {"train_visits", train_visits},
          {"seed", seed},
          {"threads", threads},
          {"train", train_to_json(train)},
          {"mmd", mmd_to_json(mmd)},
          {"mcmc", mcmc_to_json(mcmc)},
          {"latent_dim", latent_dim},
          {"bootstrap_series", bootstrap_series},
          {"bootstrap_visits", bootstrap_visits},
          {"normalization_headroom", normalization_headroom}};
}

PredictionStudyConfig PredictionStudyConfig::load(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open study config: " + path);
  json j;
  try {
    f >> j;
  } catch (const json::parse_error& e) {
    throw std::runtime_error("study config " + path + ": " + e.what());
  }
  return from_json(j);
}

PredReport run_prediction_study(const PredictionStudyConfig& config, const std::string& out_dir) {
  if (config.max_horizon < 1) throw std::invalid_argument("study: max_horizon must be >= 1");
  if (config.min_visits < 4) {
    throw std::invalid_argument("study: series need at least 4 visits (fit 3, predict 1)");
  }
  std::filesystem::create_directories(out_dir);
  const Mask& mask = Mask::standard24_2();
  const car::Adjacency adj = car::build_adjacency(mask);
  const int threads = resolve_threads(config.threads);

  // The study config reuses the simulation-study knobs for training.
  StudyConfig training_cfg;
  training_cfg.train = config.train;
  training_cfg.mmd = config.mmd;
  training_cfg.latent_dim = config.latent_dim;
  training_cfg.bootstrap_series = config.bootstrap_series;
  training_cfg.bootstrap_visits = config.bootstrap_visits;
  training_cfg.normalization_headroom = config.normalization_headroom;

  std::unique_ptr<BootstrapGenerator> boot;
  auto ensure_boot = [&]() {
    if (!boot) {
      boot = std::make_unique<BootstrapGenerator>(
          bootstrap_vae_generator(training_cfg, mask, derive_seed(config.seed, "bootstrap")));
    }
  };

  // Evaluation data: an existing dataset or generated series with varied
  // lengths.
  Dataset data;
  if (!config.dataset_path.empty()) {
    data = load_dataset(config.dataset_path);
  } else {
    if (config.max_visits < config.min_visits) {
      throw std::invalid_argument("study: max_visits < min_visits");
    }
    gen::GeneratorSpec spec;
    spec.kind = config.generator;
    spec.seed = derive_seed(config.seed, "eval-data");
    spec.id_prefix = "p";
    if (config.generator == gen::GeneratorKind::kVae) {
      ensure_boot();
      spec.decoder = &boot->model;
      spec.class_means = boot->class_means;
      spec.class_labels = boot->class_labels;
    }
    data.mask = mask;
    data.provenance = json{{"generator", gen::to_string(config.generator)},
                           {"seed", config.seed},
                           {"n_series", config.n_series},
                           {"visit_range", {config.min_visits, config.max_visits}}};
    std::uint64_t len_seed = derive_seed(config.seed, "lengths");
    for (int i = 0; i < config.n_series; ++i) {
      Rng lr(derive_seed(len_seed, static_cast<std::uint64_t>(i)));
      spec.visits = lr.uniform_int(config.min_visits, config.max_visits);
      data.series.push_back(gen::generate_series(spec, mask, i));
    }
  }
  data.validate();

  // Prediction model: load or train on generated data of the same kind.
  vae::VaeModel model;
  if (!config.model_path.empty()) {
    model = vae::load_model_file(config.model_path).model;
  } else {
    gen::GeneratorSpec tr_spec;
    tr_spec.kind = config.generator;
    tr_spec.n_series = config.train_series;
    tr_spec.visits = config.train_visits;
    tr_spec.seed = derive_seed(config.seed, "train-data");
    tr_spec.id_prefix = "tr";
    if (config.generator == gen::GeneratorKind::kVae) {
      ensure_boot();
      tr_spec.decoder = &boot->model;
      tr_spec.class_means = boot->class_means;
      tr_spec.class_labels = boot->class_labels;
    }
    Dataset tr = gen::generate_dataset(tr_spec, mask);
    TrainedVae trained =
        train_vae_on_dataset(tr, training_cfg, derive_seed(config.seed, "train-vae"));
    vae::save_model_file(out_dir + "/prediction_model.json", trained.model, trained.history,
                         trained.best_epoch);
    model = std::move(trained.model);
  }

  struct SeriesRows {
    std::vector<PredRow> rows;
  };
  std::vector<SeriesRows> slots(data.series.size());
  parallel_for(static_cast<int>(data.series.size()), threads, [&](int i) {
    const Series& s = data.series[i];
    const std::string label = s.label.value_or("");
    for (int base : config.base_visits) {
      if (s.n_visits() < base + 1) continue;
      int max_j = std::min(config.max_horizon, s.n_visits() - base);
      Series observed = slice_series(s, base);

      auto push = [&](int j, const std::string& method, double mae_val, bool ok,
                      const std::string& err) {
        PredRow r;
        r.base = base;
        r.horizon = j;
        r.method = method;
        r.series_id = s.id;
        r.label = label;
        r.mae = mae_val;
        r.ok = ok;
        r.error = err;
        slots[i].rows.push_back(std::move(r));
      };

      // VAE and PW share per-(series,base) fits across horizons.
      std::vector<double> horizon_times;
      for (int j = 1; j <= max_j; ++j) horizon_times.push_back(s.times[base + j - 1]);
      try {
        auto pw = forecast::pw_fit_predict(observed, horizon_times);
        for (int j = 1; j <= max_j; ++j) {
          push(j, "PW", mae_values(pw.predicted[j - 1], s.visits[base + j - 1]), true, "");
        }
      } catch (const std::exception& e) {
        for (int j = 1; j <= max_j; ++j) push(j, "PW", 0.0, false, e.what());
      }
      try {
        auto ts = forecast::two_stage_predict(model, observed, mask, horizon_times);
        for (int j = 1; j <= max_j; ++j) {
          push(j, "VAE", mae_values(ts.predicted[j - 1], s.visits[base + j - 1]), true, "");
        }
      } catch (const std::exception& e) {
        for (int j = 1; j <= max_j; ++j) push(j, "VAE", 0.0, false, e.what());
      }
      try {
        Eigen::MatrixXd x(base, mask.count());
        for (int t = 0; t < base; ++t) {
          for (int loc = 0; loc < mask.count(); ++loc) x(t, loc) = observed.visits[t][loc];
        }
        car::McmcConfig mc = config.mcmc;
        mc.store_phi = false;
        mc.seed = derive_seed(config.seed, "st-" + s.id + "-" + std::to_string(base));
        car::CarPosterior post = car::gibbs_fit(x, adj, mc);
        car::StForecast fc = car::forecast_st(post, adj, max_j, derive_seed(mc.seed, "fc"));
        for (int j = 1; j <= max_j; ++j) {
          std::vector<double> pred(mask.count());
          for (int loc = 0; loc < mask.count(); ++loc) pred[loc] = fc.mean[j - 1][loc];
          push(j, "ST", mae_values(pred, s.visits[base + j - 1]), true, "");
        }
      } catch (const std::exception& e) {
        for (int j = 1; j <= max_j; ++j) push(j, "ST", 0.0, false, e.what());
      }
    }
  });

  PredReport report;
  for (auto& slot : slots) {
    for (auto& r : slot.rows) report.rows.push_back(std::move(r));
  }

  // Aggregate cells: per (base, horizon, method) overall and per class label.
  std::set<std::string> labels;
  for (const auto& r : report.rows) {
    if (!r.label.empty()) labels.insert(r.label);
  }
  const std::vector<std::string> methods = {"VAE", "ST", "PW"};
  for (int base : config.base_visits) {
    for (int j = 1; j <= config.max_horizon; ++j) {
      for (const auto& method : methods) {
        std::vector<std::string> cell_labels = {"all"};
        cell_labels.insert(cell_labels.end(), labels.begin(), labels.end());
        for (const auto& lbl : cell_labels) {
          PredCell cell;
          cell.base = base;
          cell.horizon = j;
          cell.method = method;
          cell.label = lbl;
          double acc = 0.0;
          for (const auto& r : report.rows) {
            if (!r.ok || r.base != base || r.horizon != j || r.method != method) continue;
            if (lbl != "all" && r.label != lbl) continue;
            acc += r.mae;
            ++cell.included;
          }
          cell.mae_mean = cell.included > 0 ? acc / cell.included
                                            : std::numeric_limits<double>::quiet_NaN();
          report.cells.push_back(std::move(cell));
        }
      }
    }
  }

  {
    std::ofstream f(out_dir + "/prediction_series.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot open prediction_series.csv for writing");
    f << "base,horizon,method,series_id,label,mae,status,error\n";
    for (const auto& r : report.rows) {
      f << r.base << "," << r.horizon << "," << r.method << "," << r.series_id << "," << r.label
        << "," << fmt_double(r.mae) << "," << (r.ok ? "ok" : "failed") << ","
        << csv_escape(r.error) << "\n";
    }
  }
  {
    std::ofstream f(out_dir + "/prediction_cells.csv", std::ios::binary);
    if (!f) throw std::runtime_error("cannot open prediction_cells.csv for writing");
    f << "base,horizon,method,label,included,mae_mean\n";
    for (const auto& c : report.cells) {
      f << c.base << "," << c.horizon << "," << c.method << "," << c.label << "," << c.included
        << "," << fmt_double(c.mae_mean) << "\n";
    }
  }

  // Boxplot grid: rows = base visit counts, cols = horizons.
  std::vector<std::vector<svg::BoxPanel>> panels;
  for (int base : config.base_visits) {
    std::vector<svg::BoxPanel> row;
    for (int j = 1; j <= config.max_horizon; ++j) {
      svg::BoxPanel panel;
      panel.title = "base " + std::to_string(base) + ", horizon " + std::to_string(j);
      for (const auto& method : methods) {
        svg::BoxGroup grp;
        grp.label = method;
        for (const auto& r : report.rows) {
          if (r.ok && r.base == base && r.horizon == j && r.method == method) {
            grp.values.push_back(r.mae);
          }
        }
        panel.groups.push_back(std::move(grp));
      }
      row.push_back(std::move(panel));
    }
    panels.push_back(std::move(row));
  }
  svg::save_boxplot_grid(out_dir + "/prediction_mae.svg", panels,
                         "MAE by base visits and prediction horizon", "MAE");

  json manifest = {{"command", "study-predict"},
                   {"config", config.to_json()},
                   {"tool_version", kToolVersion},
                   {"format_versions",
                    {{"dataset", kDatasetFormatVersion}, {"model", vae::kModelFormatVersion}}},
                   {"outputs",
                    {"prediction_series.csv", "prediction_cells.csv", "prediction_mae.svg"}}};
  write_manifest(out_dir + "/manifest.json", manifest);
  return report;
}

void write_manifest(const std::string& path, const json& manifest) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open manifest for writing: " + path);
  f << manifest.dump(2) << "\n";
  if (!f) throw std::runtime_error("failed writing manifest: " + path);
}

}  // namespace stvae::study

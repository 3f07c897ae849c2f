#include "stvae/generators.hpp"

#include <stdexcept>

#include "stvae/rng.hpp"

namespace stvae::gen {

using nlohmann::json;

GeneratorKind generator_kind_from_string(const std::string& name) {
  if (name == "st") return GeneratorKind::kSt;
  if (name == "pw") return GeneratorKind::kPw;
  if (name == "vae") return GeneratorKind::kVae;
  throw std::invalid_argument("unknown generator kind '" + name + "' (expected st, pw or vae)");
}

std::string to_string(GeneratorKind kind) {
  switch (kind) {
    case GeneratorKind::kSt: return "st";
    case GeneratorKind::kPw: return "pw";
    case GeneratorKind::kVae: return "vae";
  }
  return "?";
}

car::CarParams sample_st_params(Rng& rng) {
  car::CarParams p;
  p.beta = rng.normal();
  p.tau2 = rng.lognormal(0.0, 1.0);
  p.eta2 = rng.lognormal(0.0, 1.0);
  p.rho = rng.truncated_normal(0.0, 1.0, 0.0, 1.0);
  p.psi = rng.truncated_normal(0.0, 1.0, 0.0, 1.0);
  return p;
}

car::CarParams sample_st_params(std::uint64_t seed) {
  Rng rng(seed);
  return sample_st_params(rng);
}

namespace {

std::string series_id(const GeneratorSpec& spec, int index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%06d", spec.id_prefix.c_str(), index);
  return buf;
}

Series generate_st_series(const GeneratorSpec& spec, const car::Adjacency& adj, int index) {
  std::uint64_t series_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(index));
  Rng prng(derive_seed(series_seed, "params"));
  car::CarParams params = sample_st_params(prng);
  car::CarSim sim =
      car::simulate_car_st(params, adj, spec.visits, derive_seed(series_seed, "sim"));

  Series s;
  s.id = series_id(spec, index);
  const int m = static_cast<int>(sim.x.cols());
  for (int t = 0; t < spec.visits; ++t) {
    s.times.push_back(static_cast<double>(t));
    std::vector<double> vals(m);
    for (int i = 0; i < m; ++i) vals[i] = sim.x(t, i);
    s.visits.push_back(std::move(vals));
  }
  s.truth = json{{"beta", params.beta},
                 {"tau2", params.tau2},
                 {"eta2", params.eta2},
                 {"rho", params.rho},
                 {"psi", params.psi}};
  return s;
}

Series generate_pw_series(const GeneratorSpec& spec, const Mask& mask, int index) {
  std::uint64_t series_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(index));
  Rng rng(derive_seed(series_seed, "pw"));
  const int m = mask.count();
  std::vector<double> intercepts(m), slopes(m), variances(m);
  for (int i = 0; i < m; ++i) {
    intercepts[i] = rng.normal();
    slopes[i] = rng.normal();
    variances[i] = rng.lognormal(0.0, 1.0);
  }
  Series s;
  s.id = series_id(spec, index);
  if (spec.pw_zero_noise) variances.assign(m, 0.0);
  for (int t = 0; t < spec.visits; ++t) {
    s.times.push_back(static_cast<double>(t));
    std::vector<double> vals(m);
    for (int i = 0; i < m; ++i) {
      double noise = variances[i] > 0.0 ? std::sqrt(variances[i]) * rng.normal() : 0.0;
      vals[i] = intercepts[i] + slopes[i] * t + noise;
    }
    s.visits.push_back(std::move(vals));
  }
  s.truth = json{{"intercepts", intercepts}, {"slopes", slopes}, {"variances", variances}};
  return s;
}

Series generate_vae_series(const GeneratorSpec& spec, const Mask& mask, int index) {
  if (spec.decoder == nullptr) {
    throw std::invalid_argument("generate_series: vae kind needs a trained decoder");
  }
  if (spec.class_means.empty()) {
    throw std::invalid_argument("generate_series: vae kind needs class-mean latent vectors");
  }
  const int k = spec.decoder->arch.latent_dim;
  for (const auto& cm : spec.class_means) {
    if (static_cast<int>(cm.size()) != k) {
      throw std::invalid_argument("generate_series: class mean length does not match latent dim");
    }
  }
  std::uint64_t series_seed = derive_seed(spec.seed, static_cast<std::uint64_t>(index));
  Rng rng(derive_seed(series_seed, "vae"));

  int cls = rng.uniform_int(0, static_cast<int>(spec.class_means.size()) - 1);
  std::vector<double> intercepts(k), slopes(k), variances(k);
  for (int d = 0; d < k; ++d) {
    intercepts[d] = rng.normal(spec.class_means[cls][d], spec.vae_intercept_sd);
    slopes[d] = spec.vae_slope_sd > 0.0 ? rng.normal(0.0, spec.vae_slope_sd) : 0.0;
    variances[d] = spec.vae_zero_noise ? 0.0 : rng.lognormal(0.0, 1.0);
  }

  Bounds bounds{spec.decoder->norm_lower, spec.decoder->norm_upper};
  Series s;
  s.id = series_id(spec, index);
  std::vector<double> code(k);
  for (int t = 0; t < spec.visits; ++t) {
    s.times.push_back(static_cast<double>(t));
    for (int d = 0; d < k; ++d) {
      double noise = variances[d] > 0.0 ? std::sqrt(variances[d]) * rng.normal() : 0.0;
      code[d] = intercepts[d] + slopes[d] * t + noise;
    }
    s.visits.push_back(denormalize_grid(vae::decode(*spec.decoder, code), mask, bounds));
  }
  s.label = spec.class_labels.at(cls);
  s.truth = json{{"class", spec.class_labels.at(cls)},
                 {"intercepts", intercepts},
                 {"slopes", slopes},
                 {"variances", variances}};
  return s;
}

}  // namespace

Series generate_series(const GeneratorSpec& spec, const Mask& mask, int index) {
  if (spec.visits < 1) throw std::invalid_argument("generate_series: visits must be >= 1");
  switch (spec.kind) {
    case GeneratorKind::kSt: {
      car::Adjacency adj = car::build_adjacency(mask);
      return generate_st_series(spec, adj, index);
    }
    case GeneratorKind::kPw:
      return generate_pw_series(spec, mask, index);
    case GeneratorKind::kVae:
      return generate_vae_series(spec, mask, index);
  }
  throw std::logic_error("generate_series: unreachable");
}

Dataset generate_dataset(const GeneratorSpec& spec, const Mask& mask) {
  if (spec.n_series < 1) throw std::invalid_argument("generate_dataset: n_series must be >= 1");
  Dataset d;
  d.mask = mask;
  d.provenance = json{{"generator", to_string(spec.kind)},
                      {"seed", spec.seed},
                      {"visits", spec.visits},
                      {"n_series", spec.n_series}};
  d.series.reserve(spec.n_series);
  if (spec.kind == GeneratorKind::kSt) {
    car::Adjacency adj = car::build_adjacency(mask);  // build once for the batch
    for (int i = 0; i < spec.n_series; ++i) d.series.push_back(generate_st_series(spec, adj, i));
  } else {
    for (int i = 0; i < spec.n_series; ++i) d.series.push_back(generate_series(spec, mask, i));
  }
  return d;
}

}  // namespace stvae::gen

#ifndef STVAE_GENERATORS_HPP
#define STVAE_GENERATORS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "stvae/car.hpp"
#include "stvae/field.hpp"
#include "stvae/vae.hpp"

namespace stvae::gen {

enum class GeneratorKind { kSt, kPw, kVae };

GeneratorKind generator_kind_from_string(const std::string& name);
std::string to_string(GeneratorKind kind);

struct GeneratorSpec {
  GeneratorKind kind = GeneratorKind::kPw;
  int n_series = 1;
  int visits = 3;  // equally spaced, times 0..T-1
  std::uint64_t seed = 0;
  std::string id_prefix = "s";

  // vae kind only: a trained decoder and per-class latent means.
  const vae::VaeModel* decoder = nullptr;
  std::vector<std::vector<double>> class_means;
  std::vector<std::string> class_labels = {"healthy", "suspect", "glaucoma"};
  double vae_intercept_sd = 1.0;
  double vae_slope_sd = 1.0;
  bool vae_zero_noise = false;

  // pw kind: drop the per-location noise (slopes/intercepts still random).
  bool pw_zero_noise = false;
};

// beta ~ N(0,1); tau2, eta2 ~ LogNormal(0,1); rho, psi ~ N(0,1) truncated
// to (0,1).
car::CarParams sample_st_params(std::uint64_t seed);
car::CarParams sample_st_params(Rng& rng);

// One series of the requested kind; series index i is reproducible in
// isolation via a seed derived from (spec.seed, i).
Series generate_series(const GeneratorSpec& spec, const Mask& mask, int index);
Dataset generate_dataset(const GeneratorSpec& spec, const Mask& mask);

}  // namespace stvae::gen

#endif

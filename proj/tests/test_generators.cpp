#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "stvae/dataset_io.hpp"
#include "stvae/generators.hpp"
#include "stvae/ols.hpp"
#include "test_support.hpp"

using namespace stvae;
using gen::GeneratorKind;
using gen::GeneratorSpec;

TEST_CASE("sample_st_params satisfies constraints and Monte Carlo moments") {
  Rng rng(404);
  const int n = 100000;
  double beta_sum = 0.0;
  std::vector<double> tau2s;
  tau2s.reserve(n);
  for (int i = 0; i < n; ++i) {
    car::CarParams p = gen::sample_st_params(rng);
    CHECK_NOTHROW(p.validate());
    beta_sum += p.beta;
    tau2s.push_back(p.tau2);
  }
  CHECK(std::fabs(beta_sum / n) < 0.01);
  std::sort(tau2s.begin(), tau2s.end());
  double median = tau2s[n / 2];
  CHECK(median > 0.98);  // log-normal median is 1
  CHECK(median < 1.02);
}

TEST_CASE("st dataset: per-series regeneration matches the batch") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::kSt;
  spec.n_series = 6;
  spec.visits = 3;
  spec.seed = 2024;
  const Mask& mask = Mask::standard24_2();
  Dataset d = gen::generate_dataset(spec, mask);
  REQUIRE(d.series.size() == 6);
  for (int i : {0, 3, 5}) {
    Series alone = gen::generate_series(spec, mask, i);
    CHECK(alone.id == d.series[i].id);
    CHECK(alone.visits == d.series[i].visits);
    CHECK(alone.truth == d.series[i].truth);
  }
  for (const auto& s : d.series) {
    CHECK(s.n_visits() == 3);
    CHECK(s.truth.has_value());
  }
}

TEST_CASE("st dataset grand mean is near zero over many series") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::kSt;
  spec.n_series = 300;
  spec.visits = 3;
  spec.seed = 11;
  Dataset d = gen::generate_dataset(spec, Mask::standard24_2());
  double acc = 0.0;
  long cnt = 0;
  for (const auto& s : d.series) {
    for (const auto& v : s.visits) {
      for (double x : v) {
        acc += x;
        ++cnt;
      }
    }
  }
  // E[x] = E[beta] = 0; the variance budget is dominated by the per-series
  // random beta, tau2 and eta2 draws
  CHECK(std::fabs(acc / cnt) < 0.25);
}

TEST_CASE("pw generator hand case and independence") {
  const Mask& mask = Mask::standard24_2();
  SUBCASE("OLS on noiseless pw data recovers the line exactly") {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::kPw;
    spec.n_series = 3;
    spec.visits = 4;
    spec.seed = 5;
    spec.pw_zero_noise = true;
    Dataset d = gen::generate_dataset(spec, mask);
    for (const auto& s : d.series) {
      const auto& truth = *s.truth;
      for (int loc = 0; loc < 52; ++loc) {
        double a = truth.at("intercepts")[loc].get<double>();
        double b = truth.at("slopes")[loc].get<double>();
        std::vector<double> y(4);
        for (int t = 0; t < 4; ++t) y[t] = s.visits[t][loc];
        auto fit = forecast::ols_fit(s.times, y);
        CHECK(fit.slope == doctest::Approx(b).epsilon(1e-10));
        CHECK(fit.intercept == doctest::Approx(a).epsilon(1e-10));
        CHECK(fit.residual_se < 1e-10);
      }
    }
  }
  SUBCASE("spatial correlation across locations is near zero") {
    GeneratorSpec spec;
    spec.kind = GeneratorKind::kPw;
    spec.n_series = 4000;
    spec.visits = 2;
    spec.seed = 77;
    Dataset d = gen::generate_dataset(spec, mask);
    // correlation of first-visit values at two distinct locations across series
    double sa = 0, sb = 0, saa = 0, sbb = 0, sab = 0;
    for (const auto& s : d.series) {
      double a = s.visits[0][3], b = s.visits[0][29];
      sa += a;
      sb += b;
      saa += a * a;
      sbb += b * b;
      sab += a * b;
    }
    double n = static_cast<double>(d.series.size());
    double corr = (sab - sa * sb / n) /
                  std::sqrt((saa - sa * sa / n) * (sbb - sb * sb / n));
    CHECK(std::fabs(corr) < 0.05);
  }
}

TEST_CASE("pw zero-noise series follow a + b t exactly") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::kPw;
  spec.n_series = 3;
  spec.visits = 3;
  spec.seed = 21;
  spec.pw_zero_noise = true;
  Dataset d = gen::generate_dataset(spec, Mask::standard24_2());
  for (const auto& s : d.series) {
    const auto& truth = *s.truth;
    for (int loc = 0; loc < 52; ++loc) {
      double a = truth.at("intercepts")[loc].get<double>();
      double b = truth.at("slopes")[loc].get<double>();
      for (int t = 0; t < 3; ++t) {
        CHECK(s.visits[t][loc] == doctest::Approx(a + b * t).epsilon(1e-14));
      }
    }
  }
  // the hand case: a=1, b=2 yields (1, 3, 5)
  double a = 1.0, b = 2.0;
  CHECK(std::vector<double>{a, a + b, a + 2 * b} == std::vector<double>{1.0, 3.0, 5.0});
}

TEST_CASE("vae generator requires a decoder and class means") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::kVae;
  spec.n_series = 1;
  spec.visits = 3;
  CHECK_THROWS_AS(gen::generate_dataset(spec, Mask::standard24_2()), std::invalid_argument);
}

TEST_CASE("vae generator produces in-range fields with labels") {
  const auto& trained = test_support::trained_small_model();
  const Mask& mask = Mask::standard24_2();
  const int k = trained.model.arch.latent_dim;

  GeneratorSpec spec;
  spec.kind = GeneratorKind::kVae;
  spec.n_series = 12;
  spec.visits = 4;
  spec.seed = 99;
  spec.decoder = &trained.model;
  spec.class_means = {std::vector<double>(k, -0.5), std::vector<double>(k, 0.0),
                      std::vector<double>(k, 0.5)};
  Dataset d = gen::generate_dataset(spec, mask);

  Bounds b{trained.model.norm_lower, trained.model.norm_upper};
  for (const auto& s : d.series) {
    REQUIRE(s.label.has_value());
    CHECK((*s.label == "healthy" || *s.label == "suspect" || *s.label == "glaucoma"));
    for (const auto& visit : s.visits) {
      for (double v : visit) {
        CHECK(v > b.lower);
        CHECK(v < b.upper);
      }
    }
  }

  SUBCASE("zero slopes and zero noise give constant series") {
    GeneratorSpec flat = spec;
    flat.vae_slope_sd = 0.0;
    flat.vae_zero_noise = true;
    Dataset df = gen::generate_dataset(flat, mask);
    for (const auto& s : df.series) {
      for (int t = 1; t < s.n_visits(); ++t) CHECK(s.visits[t] == s.visits[0]);
    }
  }

  SUBCASE("per-series regeneration matches the batch") {
    Series alone = gen::generate_series(spec, mask, 7);
    CHECK(alone.visits == d.series[7].visits);
    CHECK(alone.label == d.series[7].label);
  }

  SUBCASE("encode-decode round trip stays inside the reconstruction envelope") {
    GeneratorSpec calm = spec;
    calm.vae_zero_noise = true;
    calm.vae_slope_sd = 0.1;
    calm.vae_intercept_sd = 0.3;
    Dataset dc = gen::generate_dataset(calm, mask);
    double range = b.upper - b.lower;
    double envelope = 8.0 * std::sqrt(std::max(trained.model.sigma2, 1e-8)) * range + 1e-6;
    for (const auto& s : dc.series) {
      auto grid = pad_and_normalize(s.visits[0], mask, b);
      auto code = vae::encode(trained.model, grid);
      auto back = denormalize_grid(vae::decode(trained.model, code), mask, b);
      double err = 0.0;
      for (int i = 0; i < mask.count(); ++i) err += std::fabs(back[i] - s.visits[0][i]);
      CHECK(err / mask.count() < envelope);
    }
  }
}

TEST_CASE("generated datasets carry provenance and survive IO") {
  GeneratorSpec spec;
  spec.kind = GeneratorKind::kPw;
  spec.n_series = 3;
  spec.visits = 3;
  spec.seed = 8;
  Dataset d = gen::generate_dataset(spec, Mask::standard24_2());
  CHECK(d.provenance.at("generator") == "pw");
  CHECK(d.provenance.at("seed") == 8);
  Dataset back = dataset_from_string(dataset_to_string(d));
  CHECK(back.provenance == d.provenance);
}

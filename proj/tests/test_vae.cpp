#include <cmath>

#include <stdexcept>

#include "doctest.h"
#include "stvae/gradcheck.hpp"
#include "stvae/vae_io.hpp"
#include "stvae/vae_loss.hpp"
#include "stvae/vae_train.hpp"
#include "test_support.hpp"

using namespace stvae;
using vae::MmdConfig;
using vae::VaeArch;
using vae::VaeModel;

namespace {

VaeModel small_model(std::uint64_t seed, int k = 3, int c1 = 4, int c2 = 6, int extent = 8) {
  VaeArch arch;
  arch.latent_dim = k;
  arch.extent = extent;
  arch.conv1_channels = c1;
  arch.conv2_channels = c2;
  return VaeModel::init(arch, seed);
}

std::vector<std::vector<double>> random_fields(int n, int extent, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<std::vector<double>> out(n, std::vector<double>(extent * extent));
  for (auto& f : out) {
    for (auto& v : f) v = rng.uniform();
  }
  return out;
}

}  // namespace

TEST_CASE("encode is deterministic and batch-consistent") {
  VaeModel m = small_model(1);
  auto fields = random_fields(4, 8, 11);

  auto c1 = vae::encode(m, fields[0]);
  auto c2 = vae::encode(m, fields[0]);
  CHECK(c1 == c2);
  CHECK(static_cast<int>(c1.size()) == m.arch.latent_dim);

  nn::Tensor batch = vae::fields_to_tensor(fields, 8);
  nn::Tensor codes = vae::encode_batch(m, batch);
  for (int i = 0; i < 4; ++i) {
    auto single = vae::encode(m, fields[i]);
    for (int d = 0; d < m.arch.latent_dim; ++d) {
      CHECK(codes.data()[i * m.arch.latent_dim + d] == doctest::Approx(single[d]).epsilon(1e-15));
    }
  }

  auto bad = fields[0];
  bad[3] = std::nan("");
  CHECK_THROWS_AS(vae::encode(m, bad), std::invalid_argument);
}

TEST_CASE("decode stays in (0,1), is deterministic, rejects bad lengths") {
  VaeModel m = small_model(2);
  Rng rng(3);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> z(m.arch.latent_dim);
    for (auto& v : z) v = rng.normal(0, 3);
    auto field = vae::decode(m, z);
    CHECK(static_cast<int>(field.size()) == m.arch.extent * m.arch.extent);
    for (double v : field) {
      CHECK(v > 0.0);
      CHECK(v < 1.0);
    }
    CHECK(vae::decode(m, z) == field);
  }
  CHECK_THROWS_AS(vae::decode(m, {1.0}), std::invalid_argument);
}

TEST_CASE("decode is locally smooth on a trained model") {
  const auto& trained = test_support::trained_small_model();
  std::vector<double> z(trained.model.arch.latent_dim, 0.2);
  auto base = vae::decode(trained.model, z);
  z[0] += 1e-6;
  auto bumped = vae::decode(trained.model, z);
  double sup = 0.0;
  for (std::size_t i = 0; i < base.size(); ++i) {
    sup = std::max(sup, std::fabs(base[i] - bumped[i]));
  }
  CHECK(sup < 1e-3);
}

TEST_CASE("reconstruction loss examples") {
  SUBCASE("identical batches give zero") {
    auto fields = random_fields(3, 12, 5);
    CHECK(vae::reconstruction_loss(fields, fields) == 0.0);
  }
  SUBCASE("single-cell difference of 0.1 gives 0.01") {
    std::vector<double> a(144, 0.5), b(144, 0.5);
    b[77] += 0.1;
    double got = vae::reconstruction_loss({a}, {b});
    CHECK(got == doctest::Approx(0.01).epsilon(1e-12));
  }
  SUBCASE("symmetry") {
    auto x = random_fields(2, 12, 6);
    auto y = random_fields(2, 12, 7);
    CHECK(vae::reconstruction_loss(x, y) == doctest::Approx(vae::reconstruction_loss(y, x)));
  }
  SUBCASE("shape mismatch rejected") {
    std::vector<double> a(144, 0.5), b(100, 0.5);
    CHECK_THROWS_AS(vae::reconstruction_loss({a}, {b}), std::invalid_argument);
  }
}

TEST_CASE("vae_loss parts and degenerate cases") {
  VaeModel m = small_model(4);
  auto fields = random_fields(5, 8, 21);
  nn::Tensor batch = vae::fields_to_tensor(fields, 8);
  Rng rng(9);
  std::vector<std::vector<double>> prior(5, std::vector<double>(m.arch.latent_dim));
  for (auto& v : prior) {
    for (auto& x : v) x = rng.normal();
  }

  MmdConfig cfg;
  SUBCASE("lambda 0 reduces to the reconstruction loss") {
    cfg.lambda = 0.0;
    auto v = vae::vae_loss(m, batch, prior, cfg);
    CHECK(v.total == doctest::Approx(v.reconstruction));
    CHECK(v.regularization >= 0.0);
  }
  SUBCASE("parts add up with the weight") {
    cfg.lambda = 2.5;
    auto v = vae::vae_loss(m, batch, prior, cfg);
    CHECK(v.total == doctest::Approx(v.reconstruction + 2.5 * v.regularization));
  }
  SUBCASE("batch of one is rejected") {
    nn::Tensor single = vae::fields_to_tensor({fields[0]}, 8);
    CHECK_THROWS_AS(vae::vae_loss(m, single, prior, cfg), std::invalid_argument);
  }
}

TEST_CASE("vae_loss gradient matches finite differences on small models") {
  Rng seeds(77);
  const double step = 1e-5;
  for (int rep = 0; rep < 3; ++rep) {
    VaeModel m = small_model(100 + rep, 2 + rep % 2, 3, 4, rep == 1 ? 4 : 8);
    auto fields = random_fields(3, m.arch.extent, 200 + rep);
    nn::Tensor batch = vae::fields_to_tensor(fields, m.arch.extent);
    std::vector<std::vector<double>> prior(4, std::vector<double>(m.arch.latent_dim));
    for (auto& v : prior) {
      for (auto& x : v) x = seeds.normal();
    }
    MmdConfig cfg;
    cfg.lambda = 1.5;

    std::vector<double> analytic;
    vae::vae_loss_grad(m, batch, prior, cfg, analytic);

    VaeModel probe = m;
    auto loss = [&](const std::vector<double>& params) {
      probe.unpack_params(params);
      return vae::vae_loss(probe, batch, prior, cfg).total;
    };
    auto fd = nn::finite_difference_gradient(loss, m.pack_params(), step);
    REQUIRE(analytic.size() == fd.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < fd.size(); ++i) {
      worst = std::max(worst, nn::relative_error(analytic[i], fd[i]));
    }
    CHECK(worst < 1e-4);
  }
}

TEST_CASE("training is reproducible and improves the validation loss") {
  auto fields = test_support::synthetic_fields(240, 33);
  std::vector<std::vector<double>> train(fields.begin(), fields.begin() + 200);
  std::vector<std::vector<double>> val(fields.begin() + 200, fields.end());

  vae::VaeArch arch;
  arch.latent_dim = 4;
  arch.extent = 12;
  arch.conv1_channels = 6;
  arch.conv2_channels = 8;
  vae::TrainConfig tc;
  tc.epochs = 10;
  tc.batch_size = 50;
  tc.learning_rate = 2e-3;
  tc.seed = 44;
  MmdConfig mc;

  auto r1 = vae::train(VaeModel::init(arch, tc.seed), train, val, tc, mc);
  auto r2 = vae::train(VaeModel::init(arch, tc.seed), train, val, tc, mc);

  REQUIRE(r1.history.size() == 10);
  CHECK(r1.best_epoch == r2.best_epoch);
  CHECK(r1.model.pack_params() == r2.model.pack_params());
  for (std::size_t e = 0; e < r1.history.size(); ++e) {
    CHECK(r1.history[e].val_total == r2.history[e].val_total);
    CHECK(r1.history[e].train_total == r2.history[e].train_total);
  }

  // best epoch is the argmin of the validation history
  int argmin = 0;
  for (std::size_t e = 1; e < r1.history.size(); ++e) {
    if (r1.history[e].val_total < r1.history[argmin].val_total) argmin = static_cast<int>(e);
  }
  CHECK(r1.best_epoch == argmin);
  CHECK(r1.history[r1.best_epoch].val_reconstruction < r1.history[0].val_reconstruction);
  CHECK(r1.model.sigma2 > 0.0);
}

TEST_CASE("kl closed form") {
  CHECK(vae::kl_gaussian_closed_form({0.0, 0.0}, {1.0, 1.0}) == 0.0);
  CHECK(vae::kl_gaussian_closed_form({1.0}, {1.0}) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(vae::kl_gaussian_closed_form({0.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(vae::kl_gaussian_closed_form({0.0}, {1.0, 1.0}), std::invalid_argument);

  Rng rng(8);
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> mu = {rng.normal()}, s2 = {rng.lognormal(0, 0.5)};
    double kl = vae::kl_gaussian_closed_form(mu, s2);
    CHECK(kl >= 0.0);
    if (std::fabs(mu[0]) > 1e-6 || std::fabs(s2[0] - 1.0) > 1e-6) CHECK(kl > 0.0);
  }
}

TEST_CASE("reparameterize") {
  std::vector<double> mu = {1.0, -2.0}, sigma = {0.5, 2.0};
  CHECK(vae::reparameterize(mu, sigma, {0.0, 0.0}) == mu);
  CHECK(vae::reparameterize(mu, {0.0, 0.0}, {3.0, -4.0}) == mu);
  CHECK_THROWS_AS(vae::reparameterize(mu, sigma, {1.0}), std::invalid_argument);

  Rng rng(12);
  const int n = 100000;
  double acc = 0.0;
  for (int i = 0; i < n; ++i) {
    acc += vae::reparameterize({1.0}, {2.0}, {rng.normal()})[0];
  }
  double mean = acc / n;
  double se = 2.0 / std::sqrt(static_cast<double>(n));
  CHECK(std::fabs(mean - 1.0) < 3.0 * se);
}

TEST_CASE("elbo_loss composes reconstruction and mean KL") {
  auto batch = random_fields(2, 8, 3);
  double e = vae::elbo_loss(batch, batch, {{0.0}, {0.0}}, {{1.0}, {1.0}});
  CHECK(e == 0.0);
  double e2 = vae::elbo_loss(batch, batch, {{1.0}, {1.0}}, {{1.0}, {1.0}});
  CHECK(e2 == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("model serialization round trip") {
  const auto& trained = test_support::trained_small_model();
  std::string bytes = vae::serialize_model(trained.model, trained.history, trained.best_epoch);
  auto loaded = vae::deserialize_model(bytes);
  std::string again = vae::serialize_model(loaded.model, loaded.history, loaded.best_epoch);
  CHECK(bytes == again);

  auto fields = random_fields(2, 12, 55);
  CHECK(vae::encode(loaded.model, fields[0]) == vae::encode(trained.model, fields[0]));
  std::vector<double> z(trained.model.arch.latent_dim, 0.3);
  CHECK(vae::decode(loaded.model, z) == vae::decode(trained.model, z));
  CHECK(loaded.best_epoch == trained.best_epoch);
  REQUIRE(loaded.history.size() == trained.history.size());
  CHECK(loaded.history[0].val_total == trained.history[0].val_total);

  SUBCASE("corrupted payload is rejected without a partial model") {
    std::string truncated = bytes.substr(0, bytes.size() / 2);
    CHECK_THROWS_AS(vae::deserialize_model(truncated), std::runtime_error);
    std::string not_json = "definitely not a model";
    CHECK_THROWS_AS(vae::deserialize_model(not_json), std::runtime_error);
  }
  SUBCASE("length mismatch in a weight array is rejected") {
    auto j = nlohmann::json::parse(bytes);
    j["weights"]["enc_b1"].push_back(0.0);
    CHECK_THROWS_AS(vae::deserialize_model(j.dump()), std::runtime_error);
  }
  SUBCASE("wrong version is rejected") {
    auto j = nlohmann::json::parse(bytes);
    j["format_version"] = 999;
    CHECK_THROWS_AS(vae::deserialize_model(j.dump()), std::runtime_error);
  }
}

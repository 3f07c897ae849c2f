#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "doctest.h"
#include "stvae/car.hpp"
#include "stvae/generators.hpp"
#include "stvae/gibbs.hpp"
#include "stvae/leroux.hpp"

using namespace stvae;
using car::Adjacency;
using car::CarParams;
using car::CarPosterior;
using car::McmcConfig;

namespace {

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(v.size()));
}

std::pair<double, double> central_interval(std::vector<double> v, double level) {
  std::sort(v.begin(), v.end());
  double a = (1.0 - level) / 2.0;
  auto at = [&](double p) { return v[static_cast<std::size_t>(p * (v.size() - 1))]; };
  return {at(a), at(1.0 - a)};
}

// Brute-force posterior of the toy 2-location, T=2 problem by marginalizing
// phi analytically and integrating (tau2, eta2, rho, psi) on a product grid.
// Returns posterior mean and sd of beta.
std::pair<double, double> grid_posterior_beta(const Eigen::MatrixXd& x, const Adjacency& adj) {
  const double prior_var_beta = 1000.0;
  Eigen::VectorXd xv(4);
  xv << x(0, 0), x(0, 1), x(1, 0), x(1, 1);
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);

  const int n_log = 56, n_unit = 28;
  std::vector<double> log_grid(n_log), unit_grid(n_unit);
  const double lo = std::log(0.004), hi = std::log(60.0);
  for (int i = 0; i < n_log; ++i) log_grid[i] = lo + (hi - lo) * (i + 0.5) / n_log;
  for (int i = 0; i < n_unit; ++i) unit_grid[i] = (i + 0.5) / n_unit;

  auto log_ig_times_t = [](double t) {
    // IG(1, 0.1) density times the log-coordinate Jacobian t
    return std::log(0.1) - std::log(t) - 0.1 / t;
  };

  double z = 0.0, acc_mean = 0.0, acc_second = 0.0;
  for (double rho : unit_grid) {
    Eigen::MatrixXd qinv = car::leroux_precision(adj.W, rho).inverse();
    for (double psi : unit_grid) {
      for (double lt : log_grid) {
        double tau2 = std::exp(lt);
        Eigen::MatrixXd v = tau2 * qinv;
        for (double le : log_grid) {
          double eta2 = std::exp(le);
          Eigen::MatrixXd c(4, 4);
          c.block<2, 2>(0, 0) = v;
          c.block<2, 2>(0, 2) = psi * v;
          c.block<2, 2>(2, 0) = psi * v;
          c.block<2, 2>(2, 2) = psi * psi * v + v;
          c.diagonal().array() += eta2;

          Eigen::LLT<Eigen::MatrixXd> llt(c);
          if (llt.info() != Eigen::Success) continue;
          double logdet = 0.0;
          for (int i = 0; i < 4; ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
          Eigen::VectorXd ci_x = llt.solve(xv);
          Eigen::VectorXd ci_1 = llt.solve(ones);
          double prec_beta = ones.dot(ci_1) + 1.0 / prior_var_beta;
          double mean_beta = ones.dot(ci_x) / prec_beta;
          // beta-marginalized evidence: N(x; 0, C + prior_var * 11^T)
          double quad = xv.dot(ci_x) - mean_beta * mean_beta * prec_beta;
          double logdet_full =
              logdet + std::log(prec_beta) + std::log(prior_var_beta);
          double log_like = -0.5 * (quad + logdet_full);
          double log_w = log_like + log_ig_times_t(tau2) + log_ig_times_t(eta2);
          double w = std::exp(log_w);
          z += w;
          acc_mean += w * mean_beta;
          acc_second += w * (mean_beta * mean_beta + 1.0 / prec_beta);
        }
      }
    }
  }
  double mean = acc_mean / z;
  double var = acc_second / z - mean * mean;
  return {mean, std::sqrt(var)};
}

}  // namespace

TEST_CASE("gibbs posterior matches the grid-quadrature oracle on the toy problem") {
  Adjacency adj = car::build_adjacency(Mask::full(1, 2));
  CarParams truth;
  truth.beta = 3.0;
  truth.tau2 = 1.0;
  truth.eta2 = 0.5;
  truth.rho = 0.6;
  truth.psi = 0.5;
  car::CarSim sim = car::simulate_car_st(truth, adj, 2, 314159);

  auto [grid_mean, grid_sd] = grid_posterior_beta(sim.x, adj);

  McmcConfig cfg;
  cfg.iterations = 120000;
  cfg.burn_in = 10000;
  cfg.thinning = 1;
  cfg.seed = 8;
  cfg.store_phi = false;
  CarPosterior post = car::gibbs_fit(sim.x, adj, cfg);

  double gibbs_mean = mean_of(post.beta);
  double gibbs_sd = sd_of(post.beta);
  CHECK(std::fabs(gibbs_mean - grid_mean) / std::fabs(grid_mean) < 0.02);
  CHECK(std::fabs(gibbs_sd - grid_sd) / grid_sd < 0.02);
}

TEST_CASE("gibbs input validation") {
  Adjacency adj = car::build_adjacency(Mask::full(1, 2));
  McmcConfig cfg;
  cfg.iterations = 10;
  cfg.burn_in = 5;
  Eigen::MatrixXd one_visit(1, 2);
  one_visit << 0.0, 1.0;
  CHECK_THROWS_AS(car::gibbs_fit(one_visit, adj, cfg), std::invalid_argument);
  Eigen::MatrixXd wrong_m(3, 3);
  CHECK_THROWS_AS(car::gibbs_fit(wrong_m, adj, cfg), std::invalid_argument);
  McmcConfig bad = cfg;
  bad.burn_in = 10;
  Eigen::MatrixXd ok(2, 2);
  CHECK_THROWS_AS(car::gibbs_fit(ok, adj, bad), std::invalid_argument);
}

TEST_CASE("gibbs is reproducible and records sane acceptance rates") {
  Adjacency adj = car::build_adjacency(Mask::standard24_2());
  CarParams truth;
  truth.beta = 1.0;
  truth.tau2 = 1.5;
  truth.eta2 = 0.6;
  truth.rho = 0.8;
  truth.psi = 0.7;
  car::CarSim sim = car::simulate_car_st(truth, adj, 5, 2718);

  McmcConfig cfg;
  cfg.iterations = 900;
  cfg.burn_in = 400;
  cfg.seed = 77;
  cfg.store_phi = false;
  CarPosterior a = car::gibbs_fit(sim.x, adj, cfg);
  CarPosterior b = car::gibbs_fit(sim.x, adj, cfg);
  CHECK(a.beta == b.beta);
  CHECK(a.rho == b.rho);
  CHECK(a.psi == b.psi);
  CHECK(a.size() == 500);
  CHECK(a.rho_acceptance > 0.1);
  CHECK(a.rho_acceptance < 0.7);
}

TEST_CASE("gibbs recovers parameters on one strong-signal dataset") {
  Adjacency adj = car::build_adjacency(Mask::standard24_2());
  CarParams truth;
  truth.beta = 2.0;
  truth.tau2 = 1.0;
  truth.eta2 = 0.4;
  truth.rho = 0.7;
  truth.psi = 0.6;
  car::CarSim sim = car::simulate_car_st(truth, adj, 8, 5150);

  McmcConfig cfg;
  cfg.iterations = 2500;
  cfg.burn_in = 800;
  cfg.seed = 99;
  cfg.store_phi = false;
  CarPosterior post = car::gibbs_fit(sim.x, adj, cfg);

  auto [beta_lo, beta_hi] = central_interval(post.beta, 0.98);
  CHECK(beta_lo < truth.beta);
  CHECK(beta_hi > truth.beta);
  auto [eta_lo, eta_hi] = central_interval(post.eta2, 0.98);
  CHECK(eta_lo < truth.eta2 * 1.15);
  CHECK(eta_hi > truth.eta2 * 0.85);
  CHECK(std::fabs(mean_of(post.psi) - truth.psi) < 0.3);
}

TEST_CASE("degenerate eta2-dominated data concentrates beta at the grand mean") {
  Adjacency adj = car::build_adjacency(Mask::full(2, 3));
  CarParams p;
  p.beta = 4.0;
  p.tau2 = 1e-6;  // essentially no spatial process
  p.eta2 = 0.25;
  p.rho = 0.5;
  p.psi = 0.5;
  car::CarSim sim = car::simulate_car_st(p, adj, 6, 1234);

  McmcConfig cfg;
  cfg.iterations = 4000;
  cfg.burn_in = 1500;
  cfg.seed = 3;
  cfg.store_phi = false;
  CarPosterior post = car::gibbs_fit(sim.x, adj, cfg);
  double grand_mean = sim.x.mean();
  CHECK(std::fabs(mean_of(post.beta) - grand_mean) < 0.35);
}

TEST_CASE("forecast: degenerate posterior follows the AR mean") {
  Adjacency adj = car::build_adjacency(Mask::full(1, 2));
  CarPosterior post;
  post.T = 3;
  post.m = 2;
  Eigen::VectorXd last(2);
  last << 2.0, -1.0;
  const double beta = 1.0, psi = 0.5;
  for (int s = 0; s < 64; ++s) {
    post.beta.push_back(beta);
    post.tau2.push_back(1e-30);
    post.eta2.push_back(1e-30);
    post.rho.push_back(0.5);
    post.psi.push_back(psi);
    post.phi_last.push_back(last);
  }
  post.phi_mean = Eigen::MatrixXd::Zero(3, 2);

  car::StForecast fc = car::forecast_st(post, adj, 3, 11);
  for (int h = 1; h <= 3; ++h) {
    for (int i = 0; i < 2; ++i) {
      double want = beta + std::pow(psi, h) * last[i];
      CHECK(fc.mean[h - 1][i] == doctest::Approx(want).epsilon(1e-9));
    }
  }

  SUBCASE("psi ~ 0 samples revert to beta immediately") {
    for (auto& v : post.psi) v = 1e-14;
    car::StForecast f0 = car::forecast_st(post, adj, 2, 12);
    for (int i = 0; i < 2; ++i) {
      CHECK(f0.mean[0][i] == doctest::Approx(beta).epsilon(1e-9));
      CHECK(f0.mean[1][i] == doctest::Approx(beta).epsilon(1e-9));
    }
  }
}

TEST_CASE("forecast: horizon 0 anchors to the fitted last visit") {
  Adjacency adj = car::build_adjacency(Mask::full(2, 2));
  CarParams truth;
  truth.beta = 1.0;
  car::CarSim sim = car::simulate_car_st(truth, adj, 3, 77);
  McmcConfig cfg;
  cfg.iterations = 600;
  cfg.burn_in = 200;
  cfg.seed = 5;
  CarPosterior post = car::gibbs_fit(sim.x, adj, cfg);
  car::StForecast fc = car::forecast_st(post, adj, 0, 3);
  REQUIRE(fc.mean.size() == 1);
  Eigen::MatrixXd fit = car::posterior_mean_fit(post);
  for (int i = 0; i < 4; ++i) {
    CHECK(fc.mean[0][i] == doctest::Approx(fit(post.T - 1, i)).epsilon(1e-9));
  }
}

TEST_CASE("forecast: interval widths grow with the horizon") {
  Adjacency adj = car::build_adjacency(Mask::full(2, 3));
  CarParams truth;
  truth.beta = 0.5;
  truth.tau2 = 1.0;
  truth.eta2 = 0.3;
  truth.rho = 0.6;
  truth.psi = 0.8;
  car::CarSim sim = car::simulate_car_st(truth, adj, 5, 31);
  McmcConfig cfg;
  cfg.iterations = 1500;
  cfg.burn_in = 500;
  cfg.seed = 21;
  CarPosterior post = car::gibbs_fit(sim.x, adj, cfg);
  car::StForecast fc = car::forecast_st(post, adj, 4, 17);
  auto mean_width = [&](int h) {
    double acc = 0.0;
    for (int i = 0; i < post.m; ++i) acc += fc.upper90[h][i] - fc.lower90[h][i];
    return acc / post.m;
  };
  CHECK(mean_width(3) >= mean_width(0));
}

TEST_CASE("posterior csv export has the declared header") {
  Adjacency adj = car::build_adjacency(Mask::full(1, 2));
  CarParams truth;
  car::CarSim sim = car::simulate_car_st(truth, adj, 3, 8);
  McmcConfig cfg;
  cfg.iterations = 50;
  cfg.burn_in = 10;
  cfg.seed = 1;
  CarPosterior post = car::gibbs_fit(sim.x, adj, cfg);
  std::string path = "test_posterior.csv";
  car::save_posterior_csv(path, post, cfg);
  std::ifstream f(path);
  std::string header;
  std::getline(f, header);
  CHECK(header == "iteration,beta,tau2,eta2,rho,psi");
  int lines = 0;
  std::string line;
  while (std::getline(f, line)) ++lines;
  CHECK(lines == static_cast<int>(post.size()));
  std::remove(path.c_str());
}

#include "stvae/gibbs.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "stvae/io_util.hpp"
#include "stvae/leroux.hpp"
#include "stvae/rng.hpp"

namespace stvae::car {

namespace {

double logit(double p) { return std::log(p / (1.0 - p)); }
double inv_logit(double v) { return 1.0 / (1.0 + std::exp(-v)); }

}  // namespace

void McmcConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("McmcConfig: iterations must be >= 1");
  if (burn_in < 0 || burn_in >= iterations) {
    throw std::invalid_argument("McmcConfig: burn_in must lie in [0, iterations)");
  }
  if (thinning < 1) throw std::invalid_argument("McmcConfig: thinning must be >= 1");
  if (!(rho_step > 0.0)) throw std::invalid_argument("McmcConfig: rho_step must be > 0");
}

CarPosterior gibbs_fit(const Eigen::MatrixXd& x, const Adjacency& adj, const McmcConfig& config) {
  config.validate();
  const int T = static_cast<int>(x.rows());
  const int m = static_cast<int>(x.cols());
  if (T < 2) {
    throw std::invalid_argument("gibbs_fit: need at least 2 visits (psi is unidentifiable), got " +
                                std::to_string(T));
  }
  if (m != adj.size()) {
    throw std::invalid_argument("gibbs_fit: data has " + std::to_string(m) +
                                " locations but adjacency has " + std::to_string(adj.size()));
  }

  const Eigen::VectorXd lap_eigs = laplacian_eigenvalues(adj.W);
  Eigen::VectorXd degree = adj.W.rowwise().sum();
  Eigen::MatrixXd lap = -adj.W;
  lap.diagonal() += degree;
  const Eigen::MatrixXd identity = Eigen::MatrixXd::Identity(m, m);

  Rng rng(derive_seed(config.seed, "gibbs"));

  // Initial state: empirical moments.
  double beta = x.mean();
  Eigen::MatrixXd phi = x.array() - beta;
  double var0 = std::max(1e-6, (phi.array() * phi.array()).mean());
  double eta2 = var0 / 2.0;
  double tau2 = var0 / 2.0;
  double rho = 0.5, psi = 0.5;
  double rho_logit_step = config.rho_step;

  const double beta_prior_var = 1000.0;
  const double ig_shape = 1.0, ig_scale = 0.1;

  const int total_kept = (config.iterations - config.burn_in) / config.thinning;
  CarPosterior post;
  post.T = T;
  post.m = m;
  post.beta.reserve(total_kept);
  post.tau2.reserve(total_kept);
  post.eta2.reserve(total_kept);
  post.rho.reserve(total_kept);
  post.psi.reserve(total_kept);
  post.phi_mean = Eigen::MatrixXd::Zero(T, m);

  Eigen::MatrixXd q = leroux_precision(adj.W, rho);

  int rho_accept_window = 0, rho_window = 0;
  long rho_accept_post = 0, rho_post = 0;

  for (int iter = 0; iter < config.iterations; ++iter) {
    const bool warm = iter < config.burn_in;

    // --- phi_t | rest, forward in t, joint m-vector updates ---
    for (int t = 0; t < T; ++t) {
      double prior_scale = 1.0 / tau2;
      // own transition (t) plus reverse information from t+1
      double q_weight = prior_scale * (1.0 + (t + 1 < T ? psi * psi : 0.0));
      Eigen::MatrixXd prec = q_weight * q;
      prec.diagonal().array() += 1.0 / eta2;

      Eigen::VectorXd b = (x.row(t).transpose().array() - beta).matrix() / eta2;
      if (t == 0) {
        b.noalias() += (psi / tau2) * (q * phi.row(1).transpose());
      } else {
        b.noalias() += (psi / tau2) * (q * phi.row(t - 1).transpose());
        if (t + 1 < T) b.noalias() += (psi / tau2) * (q * phi.row(t + 1).transpose());
      }

      Eigen::LLT<Eigen::MatrixXd> llt(prec);
      if (llt.info() != Eigen::Success) {
        throw std::runtime_error("gibbs_fit: conditional precision for phi_" + std::to_string(t) +
                                 " is not positive definite at sweep " + std::to_string(iter));
      }
      Eigen::VectorXd mean = llt.solve(b);
      Eigen::VectorXd z(m);
      for (int i = 0; i < m; ++i) z[i] = rng.normal();
      phi.row(t) = (mean + llt.matrixU().solve(z)).transpose();
    }

    // --- beta | rest ---
    double resid_sum = (x - phi).sum();
    double prec_beta = static_cast<double>(T) * m / eta2 + 1.0 / beta_prior_var;
    double mean_beta = (resid_sum / eta2) / prec_beta;
    beta = rng.normal(mean_beta, std::sqrt(1.0 / prec_beta));

    // --- eta2 | rest ---
    double sse = (x.array() - beta - phi.array()).square().sum();
    eta2 = rng.inverse_gamma(ig_shape + 0.5 * T * m, ig_scale + 0.5 * sse);

    // --- tau2 | rest: quadratic forms of the AR innovations under Q ---
    double quad = (phi.row(0) * q * phi.row(0).transpose()).value();
    for (int t = 1; t < T; ++t) {
      Eigen::VectorXd d = phi.row(t).transpose() - psi * phi.row(t - 1).transpose();
      quad += d.dot(q * d);
    }
    tau2 = rng.inverse_gamma(ig_shape + 0.5 * T * m, ig_scale + 0.5 * quad);

    // --- psi | rest: normal truncated to (0,1) ---
    double a_psi = 0.0, b_psi = 0.0;
    for (int t = 1; t < T; ++t) {
      Eigen::VectorXd qp = q * phi.row(t - 1).transpose();
      a_psi += phi.row(t - 1).dot(qp);
      b_psi += phi.row(t).dot(qp);
    }
    a_psi /= tau2;
    b_psi /= tau2;
    if (a_psi > 1e-12) {
      psi = rng.truncated_normal(b_psi / a_psi, std::sqrt(1.0 / a_psi), 0.0, 1.0);
    } else {
      psi = rng.uniform(1e-12, 1.0 - 1e-12);
    }

    // --- rho | rest: random walk on logit(rho) ---
    // quad(rho) decomposes as rho * (phi' lap phi terms) + (1-rho) * (phi' phi terms)
    double quad_lap = (phi.row(0) * lap * phi.row(0).transpose()).value();
    double quad_id = phi.row(0).squaredNorm();
    for (int t = 1; t < T; ++t) {
      Eigen::VectorXd d = phi.row(t).transpose() - psi * phi.row(t - 1).transpose();
      quad_lap += d.dot(lap * d);
      quad_id += d.squaredNorm();
    }
    auto log_target = [&](double r) {
      double qf = r * quad_lap + (1.0 - r) * quad_id;
      return 0.5 * T * log_det_precision(lap_eigs, r) - 0.5 * qf / tau2 +
             std::log(r) + std::log(1.0 - r);  // logit-transform Jacobian
    };
    double cur_logit = logit(rho);
    double prop_logit = cur_logit + rho_logit_step * rng.normal();
    double prop = inv_logit(prop_logit);
    bool accepted = false;
    if (prop > 0.0 && prop < 1.0) {
      double log_ratio = log_target(prop) - log_target(rho);
      if (std::log(rng.uniform(1e-300, 1.0)) < log_ratio) {
        rho = prop;
        q = leroux_precision(adj.W, rho);
        accepted = true;
      }
    }
    if (warm) {
      ++rho_window;
      if (accepted) ++rho_accept_window;
      if (rho_window == 50) {  // adapt toward ~0.4 acceptance during burn-in
        double rate = static_cast<double>(rho_accept_window) / rho_window;
        if (rate > 0.5) rho_logit_step *= 1.4;
        if (rate < 0.3) rho_logit_step /= 1.4;
        rho_logit_step = std::clamp(rho_logit_step, 1e-3, 20.0);
        rho_window = 0;
        rho_accept_window = 0;
      }
    } else {
      ++rho_post;
      if (accepted) ++rho_accept_post;
    }

    // --- record ---
    if (!warm && (iter - config.burn_in) % config.thinning == 0) {
      post.beta.push_back(beta);
      post.tau2.push_back(tau2);
      post.eta2.push_back(eta2);
      post.rho.push_back(rho);
      post.psi.push_back(psi);
      post.phi_last.push_back(phi.row(T - 1).transpose());
      post.phi_mean += phi;
      if (config.store_phi) post.phi.push_back(phi);
    }
  }

  if (!post.beta.empty()) post.phi_mean /= static_cast<double>(post.beta.size());
  post.rho_acceptance = rho_post > 0 ? static_cast<double>(rho_accept_post) / rho_post : 0.0;
  post.rho_step_final = rho_logit_step;
  return post;
}

StForecast forecast_st(const CarPosterior& posterior, const Adjacency& adj, int horizon,
                       std::uint64_t seed) {
  if (posterior.size() == 0) throw std::invalid_argument("forecast_st: empty posterior");
  if (horizon < 0) throw std::invalid_argument("forecast_st: horizon must be >= 0");
  const int m = posterior.m;
  const std::size_t n = posterior.size();

  StForecast fc;
  if (horizon == 0) {
    // Consistency anchor: the fitted last visit under the posterior mean.
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(m);
    for (std::size_t s = 0; s < n; ++s) {
      mean += posterior.phi_last[s] + Eigen::VectorXd::Constant(m, posterior.beta[s]);
    }
    mean /= static_cast<double>(n);
    fc.mean.push_back(mean);
    // Quantiles of beta + phi_T (no observation noise at horizon 0).
    std::vector<double> buf(n);
    Eigen::VectorXd lo(m), hi(m);
    for (int i = 0; i < m; ++i) {
      for (std::size_t s = 0; s < n; ++s) buf[s] = posterior.beta[s] + posterior.phi_last[s][i];
      std::sort(buf.begin(), buf.end());
      lo[i] = buf[static_cast<std::size_t>(0.05 * (n - 1))];
      hi[i] = buf[static_cast<std::size_t>(0.95 * (n - 1))];
    }
    fc.lower90.push_back(lo);
    fc.upper90.push_back(hi);
    return fc;
  }

  Rng rng(derive_seed(seed, "st-forecast"));
  // draws[j](s, i): sample s of location i at horizon j+1
  std::vector<Eigen::MatrixXd> draws(horizon, Eigen::MatrixXd(n, m));
  for (std::size_t s = 0; s < n; ++s) {
    Eigen::MatrixXd q = leroux_precision(adj.W, posterior.rho[s]);
    Eigen::LLT<Eigen::MatrixXd> llt(q);
    if (llt.info() != Eigen::Success) {
      throw std::runtime_error("forecast_st: Cholesky failed for a posterior rho sample");
    }
    const double tau = std::sqrt(posterior.tau2[s]);
    const double eta = std::sqrt(posterior.eta2[s]);
    Eigen::VectorXd prev = posterior.phi_last[s];
    for (int j = 0; j < horizon; ++j) {
      Eigen::VectorXd z(m);
      for (int i = 0; i < m; ++i) z[i] = rng.normal();
      Eigen::VectorXd cur = posterior.psi[s] * prev + tau * llt.matrixU().solve(z);
      for (int i = 0; i < m; ++i) {
        draws[j](s, i) = posterior.beta[s] + cur[i] + eta * rng.normal();
      }
      prev = cur;
    }
  }
  std::vector<double> buf(n);
  for (int j = 0; j < horizon; ++j) {
    Eigen::VectorXd mean = draws[j].colwise().mean();
    Eigen::VectorXd lo(m), hi(m);
    for (int i = 0; i < m; ++i) {
      for (std::size_t s = 0; s < n; ++s) buf[s] = draws[j](s, i);
      std::sort(buf.begin(), buf.end());
      lo[i] = buf[static_cast<std::size_t>(0.05 * (n - 1))];
      hi[i] = buf[static_cast<std::size_t>(0.95 * (n - 1))];
    }
    fc.mean.push_back(mean);
    fc.lower90.push_back(lo);
    fc.upper90.push_back(hi);
  }
  return fc;
}

Eigen::MatrixXd posterior_mean_fit(const CarPosterior& posterior) {
  if (posterior.size() == 0) throw std::invalid_argument("posterior_mean_fit: empty posterior");
  double beta_mean = std::accumulate(posterior.beta.begin(), posterior.beta.end(), 0.0) /
                     static_cast<double>(posterior.size());
  return posterior.phi_mean.array() + beta_mean;
}

void save_posterior_csv(const std::string& path, const CarPosterior& posterior,
                        const McmcConfig& config) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open posterior file for writing: " + path);
  f << "iteration,beta,tau2,eta2,rho,psi\n";
  for (std::size_t s = 0; s < posterior.size(); ++s) {
    long iteration = config.burn_in + static_cast<long>(s) * config.thinning + 1;
    f << iteration << "," << fmt_double(posterior.beta[s]) << "," << fmt_double(posterior.tau2[s])
      << "," << fmt_double(posterior.eta2[s]) << "," << fmt_double(posterior.rho[s]) << ","
      << fmt_double(posterior.psi[s]) << "\n";
  }
  if (!f) throw std::runtime_error("failed writing posterior file: " + path);
}

}  // namespace stvae::car

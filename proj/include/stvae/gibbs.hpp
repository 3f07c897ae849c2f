#ifndef STVAE_GIBBS_HPP
#define STVAE_GIBBS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "stvae/car.hpp"

namespace stvae::car {

struct McmcConfig {
  int iterations = 5000;
  int burn_in = 2000;
  int thinning = 1;
  double rho_step = 0.8;  // initial random-walk step on logit(rho)
  std::uint64_t seed = 0;
  bool store_phi = true;

  void validate() const;
};

struct CarPosterior {
  std::vector<double> beta, tau2, eta2, rho, psi;
  // Latent fields per retained sample (T x m); empty when store_phi is off.
  std::vector<Eigen::MatrixXd> phi;
  std::vector<Eigen::VectorXd> phi_last;  // phi_T per retained sample (always kept)
  Eigen::MatrixXd phi_mean;               // running mean of phi over retained samples
  double rho_acceptance = 0.0;            // post burn-in acceptance rate
  double rho_step_final = 0.0;
  int T = 0;
  int m = 0;

  std::size_t size() const { return beta.size(); }
};

// Full conditional Gibbs sweep with a random-walk Metropolis step for rho:
//   beta (normal), eta2/tau2 (inverse gamma), each phi_t (multivariate
//   normal via dense Cholesky), psi (normal truncated to (0,1)),
//   rho (Metropolis on logit scale, adapted toward ~0.4 during burn-in).
// x is T x m over the mask's canonical cell order; T >= 2.
CarPosterior gibbs_fit(const Eigen::MatrixXd& x, const Adjacency& adj, const McmcConfig& config);

struct StForecast {
  // Entry j is the prediction j+1 visits after the last observed one
  // (for horizon 0 a single entry: the fitted last visit).
  std::vector<Eigen::VectorXd> mean;
  std::vector<Eigen::VectorXd> lower90;
  std::vector<Eigen::VectorXd> upper90;
};

// Posterior predictive: per retained sample iterate
// phi_{T+j} ~ N(psi phi_{T+j-1}, tau2 Q^-1), x = beta + phi + eps.
StForecast forecast_st(const CarPosterior& posterior, const Adjacency& adj, int horizon,
                       std::uint64_t seed);

// Observation fit under the posterior mean: beta + E[phi_it | x].
Eigen::MatrixXd posterior_mean_fit(const CarPosterior& posterior);

// Retained samples as CSV with header (iteration,beta,tau2,eta2,rho,psi).
void save_posterior_csv(const std::string& path, const CarPosterior& posterior,
                        const McmcConfig& config);

}  // namespace stvae::car

#endif

#ifndef STVAE_CAR_HPP
#define STVAE_CAR_HPP

#include <cstdint>

#include <Eigen/Dense>

#include "stvae/adjacency.hpp"

namespace stvae::car {

// Parameters of the spatiotemporal data generating process
//   x_it = beta + phi_it + eps_it,   eps ~ N(0, eta2)
//   phi_t | phi_{t-1} ~ N(psi phi_{t-1}, tau2 Q(W,rho)^-1)
//   phi_1 ~ N(0, tau2 Q(W,rho)^-1)
struct CarParams {
  double beta = 0.0;
  double tau2 = 1.0;
  double eta2 = 1.0;
  double rho = 0.5;
  double psi = 0.5;

  void validate() const;
};

struct CarSim {
  Eigen::MatrixXd x;    // T x m observations
  Eigen::MatrixXd phi;  // T x m latent fields
};

CarSim simulate_car_st(const CarParams& params, const Adjacency& adj, int T, std::uint64_t seed);

}  // namespace stvae::car

#endif

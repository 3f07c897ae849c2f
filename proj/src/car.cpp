#include "stvae/car.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "stvae/leroux.hpp"
#include "stvae/rng.hpp"

namespace stvae::car {

void CarParams::validate() const {
  if (!(tau2 > 0.0)) throw std::invalid_argument("CarParams: tau2 must be > 0");
  if (!(eta2 > 0.0)) throw std::invalid_argument("CarParams: eta2 must be > 0");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("CarParams: rho must be in (0,1)");
  if (!(psi > 0.0 && psi < 1.0)) throw std::invalid_argument("CarParams: psi must be in (0,1)");
  if (!std::isfinite(beta)) throw std::invalid_argument("CarParams: beta must be finite");
}

CarSim simulate_car_st(const CarParams& params, const Adjacency& adj, int T, std::uint64_t seed) {
  params.validate();
  if (T < 1) throw std::invalid_argument("simulate_car_st: T must be >= 1");
  const int m = adj.size();

  Eigen::MatrixXd q = leroux_precision(adj.W, params.rho);
  Eigen::LLT<Eigen::MatrixXd> llt(q);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("simulate_car_st: Cholesky of Q failed (rho=" +
                             std::to_string(params.rho) + ")");
  }

  Rng rng(seed);
  const double tau = std::sqrt(params.tau2);
  const double eta = std::sqrt(params.eta2);

  // N(0, tau2 Q^-1) draw: solve L^T y = z for Q = L L^T, scale by tau.
  auto draw_spatial = [&]() {
    Eigen::VectorXd z(m);
    for (int i = 0; i < m; ++i) z[i] = rng.normal();
    Eigen::VectorXd y = llt.matrixU().solve(z);
    return (tau * y).eval();
  };

  CarSim sim;
  sim.phi.resize(T, m);
  sim.x.resize(T, m);
  Eigen::VectorXd prev = draw_spatial();
  sim.phi.row(0) = prev.transpose();
  for (int t = 1; t < T; ++t) {
    Eigen::VectorXd cur = params.psi * prev + draw_spatial();
    sim.phi.row(t) = cur.transpose();
    prev = cur;
  }
  for (int t = 0; t < T; ++t) {
    for (int i = 0; i < m; ++i) {
      sim.x(t, i) = params.beta + sim.phi(t, i) + eta * rng.normal();
    }
  }
  return sim;
}

}  // namespace stvae::car

#include "stvae/leroux.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace stvae::car {

Eigen::MatrixXd leroux_precision(const Eigen::MatrixXd& W, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw std::invalid_argument("leroux_precision: rho must lie in [0,1), got " +
                                std::to_string(rho));
  }
  if (W.rows() != W.cols()) {
    throw std::invalid_argument("leroux_precision: W must be square");
  }
  Eigen::VectorXd degree = W.rowwise().sum();
  Eigen::MatrixXd q = -rho * W;
  q.diagonal().array() += rho * degree.array() + (1.0 - rho);
  return q;
}

Eigen::VectorXd laplacian_eigenvalues(const Eigen::MatrixXd& W) {
  Eigen::VectorXd degree = W.rowwise().sum();
  Eigen::MatrixXd lap = -W;
  lap.diagonal() += degree;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("laplacian_eigenvalues: eigendecomposition failed");
  }
  return solver.eigenvalues();
}

double log_det_precision(const Eigen::VectorXd& laplacian_eigs, double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    throw std::invalid_argument("log_det_precision: rho must lie in [0,1)");
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < laplacian_eigs.size(); ++i) {
    double v = rho * laplacian_eigs[i] + 1.0 - rho;
    if (v <= 0.0) {
      throw std::runtime_error("log_det_precision: nonpositive eigenvalue term at index " +
                               std::to_string(i));
    }
    acc += std::log(v);
  }
  return acc;
}

}  // namespace stvae::car

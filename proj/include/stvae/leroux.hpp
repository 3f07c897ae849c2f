#ifndef STVAE_LEROUX_HPP
#define STVAE_LEROUX_HPP

#include <Eigen/Dense>

namespace stvae::car {

// Q(W, rho) = rho * [diag(W 1) - W] + (1 - rho) * I, symmetric positive
// definite for rho in [0,1); smallest eigenvalue is at least 1 - rho.
Eigen::MatrixXd leroux_precision(const Eigen::MatrixXd& W, double rho);

// Eigenvalues of the graph Laplacian diag(W 1) - W, computed once per W and
// reused for every rho evaluation in the Metropolis step.
Eigen::VectorXd laplacian_eigenvalues(const Eigen::MatrixXd& W);

// log det Q(W, rho) = sum_i log(rho * lambda_i + 1 - rho)
double log_det_precision(const Eigen::VectorXd& laplacian_eigs, double rho);

}  // namespace stvae::car

#endif

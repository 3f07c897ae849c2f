#ifndef STVAE_METRICS_HPP
#define STVAE_METRICS_HPP

#include <Eigen/Dense>
#include <vector>

#include "stvae/mask.hpp"

namespace stvae {

// Mean absolute difference over the informative cells only; padded cells of
// either grid never contribute. Inputs are full grids in raw units.
double mae(const std::vector<double>& predicted_grid, const std::vector<double>& truth_grid,
           const Mask& mask);
// Same metric over mask-ordered value vectors.
double mae_values(const std::vector<double>& predicted, const std::vector<double>& truth);

// sqrt(sum r^2 / (n - dof)), pooled over all residuals of one series fit.
double residual_standard_error(const std::vector<double>& residuals, int dof);

// Sample correlations of one series: spatial (m x m, across visits) and
// temporal (T x T, across locations). Entries whose inputs have zero
// variance are NaN ("undefined"), never fabricated.
struct CorrelationPair {
  Eigen::MatrixXd spatial;
  Eigen::MatrixXd temporal;
};
CorrelationPair empirical_correlations(const std::vector<std::vector<double>>& visits);

// Mean |r| over defined off-diagonal entries; the smoothing diagnostic.
double mean_abs_offdiagonal(const Eigen::MatrixXd& corr);

}  // namespace stvae

#endif

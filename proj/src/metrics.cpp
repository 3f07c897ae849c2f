#include "stvae/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace stvae {

double mae(const std::vector<double>& predicted_grid, const std::vector<double>& truth_grid,
           const Mask& mask) {
  const std::size_t cells = static_cast<std::size_t>(mask.rows) * mask.cols;
  if (predicted_grid.size() != cells || truth_grid.size() != cells) {
    throw std::invalid_argument("mae: grid sizes (" + std::to_string(predicted_grid.size()) +
                                ", " + std::to_string(truth_grid.size()) +
                                ") do not match the mask grid " + std::to_string(cells));
  }
  double acc = 0.0;
  for (int idx : mask.cells) acc += std::fabs(predicted_grid[idx] - truth_grid[idx]);
  return acc / mask.count();
}

double mae_values(const std::vector<double>& predicted, const std::vector<double>& truth) {
  if (predicted.size() != truth.size() || predicted.empty()) {
    throw std::invalid_argument("mae_values: length mismatch " +
                                std::to_string(predicted.size()) + " vs " +
                                std::to_string(truth.size()));
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) acc += std::fabs(predicted[i] - truth[i]);
  return acc / static_cast<double>(predicted.size());
}

double residual_standard_error(const std::vector<double>& residuals, int dof) {
  if (dof < 0) throw std::invalid_argument("residual_standard_error: dof must be >= 0");
  if (static_cast<int>(residuals.size()) <= dof) {
    throw std::invalid_argument("residual_standard_error: " + std::to_string(residuals.size()) +
                                " residuals with dof " + std::to_string(dof));
  }
  double sse = 0.0;
  for (double r : residuals) sse += r * r;
  return std::sqrt(sse / (static_cast<double>(residuals.size()) - dof));
}

namespace {

// corr of columns a, b of data (rows are observations); NaN if either column
// is constant.
double column_corr(const Eigen::MatrixXd& data, int a, int b) {
  const auto n = data.rows();
  double ma = data.col(a).mean(), mb = data.col(b).mean();
  double sa = 0.0, sb = 0.0, sab = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double da = data(i, a) - ma, db = data(i, b) - mb;
    sa += da * da;
    sb += db * db;
    sab += da * db;
  }
  if (sa <= 0.0 || sb <= 0.0) return std::numeric_limits<double>::quiet_NaN();
  return sab / std::sqrt(sa * sb);
}

Eigen::MatrixXd corr_matrix(const Eigen::MatrixXd& data) {
  const auto k = data.cols();
  Eigen::MatrixXd c(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    c(i, i) = 1.0;
    for (Eigen::Index j = i + 1; j < k; ++j) {
      double r = column_corr(data, static_cast<int>(i), static_cast<int>(j));
      c(i, j) = r;
      c(j, i) = r;
    }
  }
  return c;
}

}  // namespace

CorrelationPair empirical_correlations(const std::vector<std::vector<double>>& visits) {
  if (visits.empty()) throw std::invalid_argument("empirical_correlations: no visits");
  const int t_count = static_cast<int>(visits.size());
  const int m = static_cast<int>(visits[0].size());
  if (m < 2) throw std::invalid_argument("empirical_correlations: need >= 2 locations");
  if (t_count < 2) throw std::invalid_argument("empirical_correlations: need >= 2 visits");
  Eigen::MatrixXd data(t_count, m);  // rows: visits, cols: locations
  for (int t = 0; t < t_count; ++t) {
    if (static_cast<int>(visits[t].size()) != m) {
      throw std::invalid_argument("empirical_correlations: ragged visit " + std::to_string(t));
    }
    for (int i = 0; i < m; ++i) data(t, i) = visits[t][i];
  }
  CorrelationPair out;
  out.spatial = corr_matrix(data);                        // across visits
  out.temporal = corr_matrix(data.transpose().eval());    // across locations
  return out;
}

double mean_abs_offdiagonal(const Eigen::MatrixXd& corr) {
  double acc = 0.0;
  long cnt = 0;
  for (Eigen::Index i = 0; i < corr.rows(); ++i) {
    for (Eigen::Index j = 0; j < corr.cols(); ++j) {
      if (i == j || std::isnan(corr(i, j))) continue;
      acc += std::fabs(corr(i, j));
      ++cnt;
    }
  }
  return cnt > 0 ? acc / cnt : std::numeric_limits<double>::quiet_NaN();
}

}  // namespace stvae

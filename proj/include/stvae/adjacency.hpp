#ifndef STVAE_ADJACENCY_HPP
#define STVAE_ADJACENCY_HPP

#include <Eigen/Dense>

#include "stvae/mask.hpp"

namespace stvae::car {

// Queen (edge-or-corner) adjacency over the informative cells of a mask.
// Row/column order follows the mask's canonical cell order.
struct Adjacency {
  Eigen::MatrixXd W;  // m x m, symmetric 0/1, zero diagonal

  int size() const { return static_cast<int>(W.rows()); }
};

// Rejects masks with fewer than 2 cells or whose cells are disconnected
// under queen adjacency (the CAR precision would decouple into blocks).
Adjacency build_adjacency(const Mask& mask);

}  // namespace stvae::car

#endif

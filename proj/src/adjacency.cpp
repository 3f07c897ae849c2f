#include "stvae/adjacency.hpp"

#include <queue>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace stvae::car {

Adjacency build_adjacency(const Mask& mask) {
  const int m = mask.count();
  if (m < 2) {
    throw std::invalid_argument("build_adjacency: mask must have at least 2 informative cells");
  }
  std::unordered_map<int, int> cell_to_index;
  for (int i = 0; i < m; ++i) cell_to_index[mask.cells[i]] = i;

  Adjacency adj;
  adj.W = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    int r = mask.cells[i] / mask.cols;
    int c = mask.cells[i] % mask.cols;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        if (dr == 0 && dc == 0) continue;
        int rr = r + dr, cc = c + dc;
        if (rr < 0 || rr >= mask.rows || cc < 0 || cc >= mask.cols) continue;
        auto it = cell_to_index.find(rr * mask.cols + cc);
        if (it != cell_to_index.end()) adj.W(i, it->second) = 1.0;
      }
    }
  }

  // Connectivity check; report component sizes if it fails.
  std::vector<int> comp(m, -1);
  int n_comp = 0;
  for (int s = 0; s < m; ++s) {
    if (comp[s] >= 0) continue;
    std::queue<int> q;
    q.push(s);
    comp[s] = n_comp;
    while (!q.empty()) {
      int u = q.front();
      q.pop();
      for (int v = 0; v < m; ++v) {
        if (adj.W(u, v) > 0.0 && comp[v] < 0) {
          comp[v] = n_comp;
          q.push(v);
        }
      }
    }
    ++n_comp;
  }
  if (n_comp > 1) {
    std::vector<int> sizes(n_comp, 0);
    for (int c : comp) ++sizes[c];
    std::string msg = "build_adjacency: mask is disconnected under queen adjacency (" +
                      std::to_string(n_comp) + " components with sizes";
    for (int s : sizes) msg += " " + std::to_string(s);
    throw std::invalid_argument(msg + ")");
  }
  return adj;
}

}  // namespace stvae::car

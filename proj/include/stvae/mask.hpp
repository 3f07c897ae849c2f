#ifndef STVAE_MASK_HPP
#define STVAE_MASK_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace stvae {

// Informative-location mask on a rectangular grid. Cells are listed in
// row-major order; that ordering is the canonical value order everywhere
// (dataset files, adjacency rows, prediction records).
struct Mask {
  int rows = 0;
  int cols = 0;
  std::vector<std::uint8_t> on;  // rows*cols flags
  std::vector<int> cells;        // flat indices of informative cells

  static Mask from_strings(const std::vector<std::string>& lines);
  static Mask full(int rows, int cols);
  // The 24-2 perimetry pattern padded into a 12x12 grid: 54 points minus the
  // two blind-spot locations, 52 informative cells.
  static const Mask& standard24_2();

  std::vector<std::string> to_strings() const;
  int count() const { return static_cast<int>(cells.size()); }
  bool is_on(int r, int c) const { return on[static_cast<std::size_t>(r) * cols + c] != 0; }

  // Expand mask-ordered values into a full grid, padding the rest.
  std::vector<double> expand(const std::vector<double>& values, double pad_value) const;
  // Collect informative cells of a full grid in canonical order.
  std::vector<double> extract(const std::vector<double>& grid) const;

  bool operator==(const Mask& other) const {
    return rows == other.rows && cols == other.cols && on == other.on;
  }
};

Mask load_mask_file(const std::string& path);

}  // namespace stvae

#endif

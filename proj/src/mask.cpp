#include "stvae/mask.hpp"

#include <fstream>
#include <stdexcept>

namespace stvae {

Mask Mask::from_strings(const std::vector<std::string>& lines) {
  if (lines.empty()) throw std::invalid_argument("mask: no rows");
  Mask m;
  m.rows = static_cast<int>(lines.size());
  m.cols = static_cast<int>(lines[0].size());
  if (m.cols == 0) throw std::invalid_argument("mask: empty first row");
  m.on.reserve(static_cast<std::size_t>(m.rows) * m.cols);
  for (int r = 0; r < m.rows; ++r) {
    if (static_cast<int>(lines[r].size()) != m.cols) {
      throw std::invalid_argument("mask: row " + std::to_string(r) + " has length " +
                                  std::to_string(lines[r].size()) + ", expected " +
                                  std::to_string(m.cols));
    }
    for (int c = 0; c < m.cols; ++c) {
      char ch = lines[r][c];
      if (ch != '#' && ch != '.') {
        throw std::invalid_argument("mask: unexpected character '" + std::string(1, ch) +
                                    "' at row " + std::to_string(r));
      }
      bool v = ch == '#';
      m.on.push_back(v ? 1 : 0);
      if (v) m.cells.push_back(r * m.cols + c);
    }
  }
  return m;
}

Mask Mask::full(int rows, int cols) {
  std::vector<std::string> lines(rows, std::string(cols, '#'));
  return from_strings(lines);
}

const Mask& Mask::standard24_2() {
  static const Mask m = from_strings({
      "............",
      "............",
      "....####....",
      "...######...",
      "..########..",
      ".#######.#..",
      ".#######.#..",
      "..########..",
      "...######...",
      "....####....",
      "............",
      "............",
  });
  return m;
}

std::vector<std::string> Mask::to_strings() const {
  std::vector<std::string> lines(rows, std::string(cols, '.'));
  for (int idx : cells) lines[idx / cols][idx % cols] = '#';
  return lines;
}

std::vector<double> Mask::expand(const std::vector<double>& values, double pad_value) const {
  if (static_cast<int>(values.size()) != count()) {
    throw std::invalid_argument("mask: expected " + std::to_string(count()) + " values, got " +
                                std::to_string(values.size()));
  }
  std::vector<double> grid(static_cast<std::size_t>(rows) * cols, pad_value);
  for (std::size_t i = 0; i < cells.size(); ++i) grid[cells[i]] = values[i];
  return grid;
}

std::vector<double> Mask::extract(const std::vector<double>& grid) const {
  if (grid.size() != static_cast<std::size_t>(rows) * cols) {
    throw std::invalid_argument("mask: grid size " + std::to_string(grid.size()) +
                                " does not match " + std::to_string(rows) + "x" +
                                std::to_string(cols));
  }
  std::vector<double> v(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) v[i] = grid[cells[i]];
  return v;
}

Mask load_mask_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open mask file: " + path);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(f, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return Mask::from_strings(lines);
}

}  // namespace stvae

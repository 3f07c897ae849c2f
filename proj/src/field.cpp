#include "stvae/field.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace stvae {

void Bounds::validate() const {
  if (!(upper > lower)) {
    throw std::invalid_argument("Bounds: upper (" + std::to_string(upper) +
                                ") must exceed lower (" + std::to_string(lower) + ")");
  }
}

std::vector<double> pad_and_normalize(const std::vector<double>& values, const Mask& mask,
                                      const Bounds& bounds) {
  bounds.validate();
  if (static_cast<int>(values.size()) != mask.count()) {
    throw std::invalid_argument("pad_and_normalize: expected " + std::to_string(mask.count()) +
                                " values, got " + std::to_string(values.size()));
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw std::invalid_argument("pad_and_normalize: non-finite value at location " +
                                  std::to_string(i));
    }
    if (values[i] < bounds.lower) {
      throw std::invalid_argument("pad_and_normalize: value " + std::to_string(values[i]) +
                                  " at location " + std::to_string(i) +
                                  " is below the lower bound " + std::to_string(bounds.lower));
    }
    if (values[i] > bounds.upper) {
      throw std::invalid_argument("pad_and_normalize: value " + std::to_string(values[i]) +
                                  " at location " + std::to_string(i) +
                                  " is above the upper bound " + std::to_string(bounds.upper));
    }
  }
  std::vector<double> grid(static_cast<std::size_t>(mask.rows) * mask.cols, 0.0);
  for (std::size_t i = 0; i < mask.cells.size(); ++i) {
    grid[mask.cells[i]] = bounds.normalize(values[i]);
  }
  return grid;
}

std::vector<double> denormalize_grid(const std::vector<double>& grid, const Mask& mask,
                                     const Bounds& bounds) {
  bounds.validate();
  std::vector<double> masked = mask.extract(grid);
  for (auto& v : masked) v = bounds.denormalize(v);
  return masked;
}

void Series::validate(int expect_values) const {
  if (id.empty()) throw std::invalid_argument("Series: empty id");
  if (times.empty()) throw std::invalid_argument("Series " + id + ": needs at least one visit");
  if (times.size() != visits.size()) {
    throw std::invalid_argument("Series " + id + ": " + std::to_string(times.size()) +
                                " times vs " + std::to_string(visits.size()) + " visits");
  }
  for (std::size_t t = 1; t < times.size(); ++t) {
    if (!(times[t] > times[t - 1])) {
      throw std::invalid_argument("Series " + id + ": times must be strictly increasing at visit " +
                                  std::to_string(t));
    }
  }
  for (std::size_t t = 0; t < visits.size(); ++t) {
    if (static_cast<int>(visits[t].size()) != expect_values) {
      throw std::invalid_argument("Series " + id + ": visit " + std::to_string(t) + " has " +
                                  std::to_string(visits[t].size()) + " values, expected " +
                                  std::to_string(expect_values));
    }
  }
}

void Dataset::validate() const {
  std::set<std::string> ids;
  for (const auto& s : series) {
    s.validate(mask.count());
    if (!ids.insert(s.id).second) {
      throw std::invalid_argument("Dataset: duplicate series id '" + s.id + "'");
    }
  }
}

}  // namespace stvae

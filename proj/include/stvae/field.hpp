#ifndef STVAE_FIELD_HPP
#define STVAE_FIELD_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "stvae/mask.hpp"

namespace stvae {

// The padding constant: the minimum total-deviation value. Padded grid cells
// hold it in raw units, and it maps to exactly 0 after normalization.
inline constexpr double kPadValue = -37.0;

struct Bounds {
  double lower = kPadValue;
  double upper = 3.0;

  void validate() const;
  double normalize(double v) const { return (v - lower) / (upper - lower); }
  double denormalize(double u) const { return lower + u * (upper - lower); }
};

// 52 raw values (mask order) -> full normalized grid in [0,1]; padded cells
// map to exactly 0.
std::vector<double> pad_and_normalize(const std::vector<double>& values, const Mask& mask,
                                      const Bounds& bounds);
// Exact inverse on informative cells: normalized grid -> raw values.
std::vector<double> denormalize_grid(const std::vector<double>& grid, const Mask& mask,
                                     const Bounds& bounds);

struct Series {
  std::string id;
  std::vector<double> times;                 // strictly increasing
  std::vector<std::vector<double>> visits;   // raw values in mask order
  std::optional<std::string> label;          // healthy / suspect / glaucoma
  std::optional<nlohmann::json> truth;       // generator truth parameters

  int n_visits() const { return static_cast<int>(times.size()); }
  void validate(int expect_values) const;
};

struct Dataset {
  Mask mask = Mask::standard24_2();
  double lower_bound = kPadValue;
  std::optional<double> upper_bound;
  nlohmann::json provenance;  // generator kind, master seed, spec echo
  std::vector<Series> series;

  void validate() const;  // unique ids, per-series invariants
};

}  // namespace stvae

#endif

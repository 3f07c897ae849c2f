#include "stvae/split.hpp"

#include <cmath>
#include <stdexcept>

#include "stvae/rng.hpp"

namespace stvae {

SplitResult split_patients(const Dataset& dataset, const std::array<double, 3>& probabilities,
                           std::uint64_t seed) {
  double sum = probabilities[0] + probabilities[1] + probabilities[2];
  if (std::fabs(sum - 1.0) > 1e-9) {
    throw std::invalid_argument("split_patients: probabilities must sum to 1, got " +
                                std::to_string(sum));
  }
  for (double p : probabilities) {
    if (p < 0.0) throw std::invalid_argument("split_patients: negative probability");
  }

  SplitResult out;
  for (Dataset* part : {&out.train, &out.validation, &out.test}) {
    part->mask = dataset.mask;
    part->lower_bound = dataset.lower_bound;
    part->upper_bound = dataset.upper_bound;
    part->provenance = dataset.provenance;
  }
  Rng rng(derive_seed(seed, "split"));
  for (const auto& s : dataset.series) {
    double u = rng.uniform();
    if (u < probabilities[0]) {
      out.train.series.push_back(s);
    } else if (u < probabilities[0] + probabilities[1]) {
      out.validation.series.push_back(s);
    } else {
      out.test.series.push_back(s);
    }
  }
  return out;
}

}  // namespace stvae

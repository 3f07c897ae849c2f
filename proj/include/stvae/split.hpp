#ifndef STVAE_SPLIT_HPP
#define STVAE_SPLIT_HPP

#include <array>
#include <cstdint>

#include "stvae/field.hpp"

namespace stvae {

struct SplitResult {
  Dataset train, validation, test;
};

// Assigns every series wholly to one split by an independent seeded
// categorical draw; done at the series (patient) level so all visits of a
// series land in the same split.
SplitResult split_patients(const Dataset& dataset, const std::array<double, 3>& probabilities,
                           std::uint64_t seed);

}  // namespace stvae

#endif

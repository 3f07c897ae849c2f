#ifndef STVAE_IO_UTIL_HPP
#define STVAE_IO_UTIL_HPP

#include <cmath>
#include <string>

#include "json.hpp"

namespace stvae {

// Shortest round-trip decimal form, identical across runs; NaN prints as
// "nan" (report cells flagged undefined).
inline std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return nlohmann::json(v).dump();
}

}  // namespace stvae

#endif

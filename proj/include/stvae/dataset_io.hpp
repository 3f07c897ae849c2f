#ifndef STVAE_DATASET_IO_HPP
#define STVAE_DATASET_IO_HPP

#include <string>

#include "stvae/field.hpp"

namespace stvae {

inline constexpr int kDatasetFormatVersion = 1;

// Line-delimited text: a JSON header object on line 1 (format_version, mask
// layout, bounds, provenance, per-series metadata), then one JSON record per
// visit {series_id, visit, time, values[52]}. load(save(d)) == d exactly.
void save_dataset(const std::string& path, const Dataset& dataset);
Dataset load_dataset(const std::string& path);

std::string dataset_to_string(const Dataset& dataset);
Dataset dataset_from_string(const std::string& text);

}  // namespace stvae

#endif

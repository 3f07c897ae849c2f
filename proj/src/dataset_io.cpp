#include "stvae/dataset_io.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace stvae {

using nlohmann::json;

std::string dataset_to_string(const Dataset& dataset) {
  dataset.validate();
  json header;
  header["format"] = "stvae-dataset";
  header["format_version"] = kDatasetFormatVersion;
  header["mask"] = dataset.mask.to_strings();
  json bounds;
  bounds["lower"] = dataset.lower_bound;
  if (dataset.upper_bound) bounds["upper"] = *dataset.upper_bound;
  header["bounds"] = bounds;
  header["provenance"] = dataset.provenance.is_null() ? json::object() : dataset.provenance;
  json meta = json::object();
  for (const auto& s : dataset.series) {
    json entry = json::object();
    if (s.label) entry["label"] = *s.label;
    if (s.truth) entry["truth"] = *s.truth;
    if (!entry.empty()) meta[s.id] = entry;
  }
  header["series_meta"] = meta;

  std::ostringstream out;
  out << header.dump() << "\n";
  for (const auto& s : dataset.series) {
    for (std::size_t t = 0; t < s.visits.size(); ++t) {
      json rec;
      rec["series_id"] = s.id;
      rec["visit"] = static_cast<int>(t);
      rec["time"] = s.times[t];
      rec["values"] = s.visits[t];
      out << rec.dump() << "\n";
    }
  }
  return out.str();
}

Dataset dataset_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int line_no = 0;

  if (!std::getline(in, line)) throw std::runtime_error("dataset file: empty");
  ++line_no;
  json header;
  try {
    header = json::parse(line);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("dataset file: line 1 is not a valid JSON header (" +
                             std::string(e.what()) + ")");
  }
  if (header.value("format", "") != "stvae-dataset") {
    throw std::runtime_error("dataset file: missing or wrong format tag on line 1");
  }
  if (header.value("format_version", -1) != kDatasetFormatVersion) {
    throw std::runtime_error("dataset file: unsupported format_version " +
                             header.value("format_version", json()).dump());
  }

  Dataset d;
  d.mask = Mask::from_strings(header.at("mask").get<std::vector<std::string>>());
  if (d.mask.count() != 52) {
    throw std::runtime_error("dataset file: header mask has " + std::to_string(d.mask.count()) +
                             " informative cells, expected 52");
  }
  d.lower_bound = header.at("bounds").at("lower").get<double>();
  if (header.at("bounds").contains("upper")) {
    d.upper_bound = header.at("bounds").at("upper").get<double>();
  }
  d.provenance = header.value("provenance", json::object());
  json meta = header.value("series_meta", json::object());

  std::vector<std::string> order;  // series in order of first appearance
  std::map<std::string, Series> by_id;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw std::runtime_error("dataset file: line " + std::to_string(line_no) +
                               " is not a valid record (" + std::string(e.what()) + ")");
    }
    std::string id;
    double time = 0.0;
    int visit = -1;
    std::vector<double> values;
    try {
      id = rec.at("series_id").get<std::string>();
      visit = rec.at("visit").get<int>();
      time = rec.at("time").get<double>();
      values = rec.at("values").get<std::vector<double>>();
    } catch (const json::exception& e) {
      throw std::runtime_error("dataset file: line " + std::to_string(line_no) +
                               " is missing required fields (" + std::string(e.what()) + ")");
    }
    if (static_cast<int>(values.size()) != d.mask.count()) {
      throw std::runtime_error("dataset file: line " + std::to_string(line_no) + " carries " +
                               std::to_string(values.size()) + " values, expected " +
                               std::to_string(d.mask.count()));
    }
    auto [it, inserted] = by_id.try_emplace(id);
    Series& s = it->second;
    if (inserted) {
      s.id = id;
      order.push_back(id);
      if (meta.contains(id)) {
        const json& entry = meta.at(id);
        if (entry.contains("label")) s.label = entry.at("label").get<std::string>();
        if (entry.contains("truth")) s.truth = entry.at("truth");
      }
    }
    if (visit != static_cast<int>(s.times.size())) {
      throw std::runtime_error("dataset file: line " + std::to_string(line_no) +
                               " has visit index " + std::to_string(visit) + ", expected " +
                               std::to_string(s.times.size()) + " for series '" + id + "'");
    }
    if (!s.times.empty() && !(time > s.times.back())) {
      throw std::runtime_error("dataset file: line " + std::to_string(line_no) +
                               " has non-increasing time for series '" + id + "'");
    }
    s.times.push_back(time);
    s.visits.push_back(std::move(values));
  }

  d.series.reserve(order.size());
  for (const auto& id : order) d.series.push_back(std::move(by_id.at(id)));
  d.validate();
  return d;
}

void save_dataset(const std::string& path, const Dataset& dataset) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open dataset file for writing: " + path);
  f << dataset_to_string(dataset);
  if (!f) throw std::runtime_error("failed writing dataset file: " + path);
}

Dataset load_dataset(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open dataset file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return dataset_from_string(ss.str());
}

}  // namespace stvae

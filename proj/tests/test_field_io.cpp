#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "doctest.h"
#include "stvae/dataset_io.hpp"
#include "stvae/field.hpp"
#include "stvae/generators.hpp"
#include "stvae/rng.hpp"

using namespace stvae;

namespace {

std::vector<double> random_values(int n, std::uint64_t seed, double lo = -30.0, double hi = 2.0) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (auto& x : v) x = rng.uniform(lo, hi);
  return v;
}

Dataset tiny_dataset(std::uint64_t seed) {
  gen::GeneratorSpec spec;
  spec.kind = gen::GeneratorKind::kPw;
  spec.n_series = 4;
  spec.visits = 3;
  spec.seed = seed;
  return gen::generate_dataset(spec, Mask::standard24_2());
}

}  // namespace

TEST_CASE("mask basics") {
  const Mask& m = Mask::standard24_2();
  CHECK(m.rows == 12);
  CHECK(m.cols == 12);
  CHECK(m.count() == 52);
  // canonical order round trip through strings
  Mask again = Mask::from_strings(m.to_strings());
  CHECK(again == m);
  CHECK(again.cells == m.cells);

  auto vals = random_values(52, 3);
  auto grid = m.expand(vals, kPadValue);
  CHECK(grid.size() == 144);
  CHECK(m.extract(grid) == vals);
  int pad_cells = 0;
  for (double v : grid) {
    if (v == kPadValue) ++pad_cells;
  }
  CHECK(pad_cells == 144 - 52);
}

TEST_CASE("pad_and_normalize maps bounds to 0 and 1 and padding to exactly 0") {
  const Mask& m = Mask::standard24_2();
  Bounds b{-37.0, 3.0};
  std::vector<double> vals(52, 0.0);
  vals[0] = -37.0;
  vals[1] = 3.0;
  auto grid = pad_and_normalize(vals, m, b);
  CHECK(grid[m.cells[0]] == 0.0);
  CHECK(grid[m.cells[1]] == 1.0);
  for (int r = 0; r < 12; ++r) {
    for (int c = 0; c < 12; ++c) {
      if (!m.is_on(r, c)) CHECK(grid[r * 12 + c] == 0.0);
    }
  }
}

TEST_CASE("normalization round trip is exact on informative cells") {
  const Mask& m = Mask::standard24_2();
  Bounds b{-37.0, 2.5};
  auto vals = random_values(52, 9, -36.0, 2.0);
  auto grid = pad_and_normalize(vals, m, b);
  auto back = denormalize_grid(grid, m, b);
  for (int i = 0; i < 52; ++i) CHECK(std::fabs(back[i] - vals[i]) < 1e-12);
}

TEST_CASE("pad_and_normalize rejects out-of-range values naming the location") {
  const Mask& m = Mask::standard24_2();
  Bounds b{-37.0, 3.0};
  auto vals = random_values(52, 10, -30.0, 0.0);
  vals[17] = 4.5;  // above the upper bound
  try {
    pad_and_normalize(vals, m, b);
    FAIL("expected rejection");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()).find("17") != std::string::npos);
  }
  vals[17] = -40.0;  // below the lower bound
  CHECK_THROWS_AS(pad_and_normalize(vals, m, b), std::invalid_argument);
}

TEST_CASE("series and dataset invariants") {
  Series s;
  s.id = "a";
  s.times = {0.0, 1.0};
  s.visits = {random_values(52, 1), random_values(52, 2)};
  CHECK_NOTHROW(s.validate(52));
  s.times = {0.0, 0.0};
  CHECK_THROWS_AS(s.validate(52), std::invalid_argument);
  s.times = {0.0};
  CHECK_THROWS_AS(s.validate(52), std::invalid_argument);

  Dataset d = tiny_dataset(5);
  CHECK_NOTHROW(d.validate());
  d.series.push_back(d.series[0]);  // duplicate id
  CHECK_THROWS_AS(d.validate(), std::invalid_argument);
}

TEST_CASE("dataset save/load round trip preserves everything") {
  Dataset d = tiny_dataset(123);
  d.series[0].label = "glaucoma";
  d.upper_bound = 4.25;
  std::string text = dataset_to_string(d);
  Dataset back = dataset_from_string(text);

  REQUIRE(back.series.size() == d.series.size());
  CHECK(back.mask == d.mask);
  CHECK(back.lower_bound == d.lower_bound);
  CHECK(back.upper_bound == d.upper_bound);
  CHECK(back.provenance == d.provenance);
  for (std::size_t i = 0; i < d.series.size(); ++i) {
    CHECK(back.series[i].id == d.series[i].id);
    CHECK(back.series[i].times == d.series[i].times);
    CHECK(back.series[i].visits == d.series[i].visits);
    CHECK(back.series[i].label == d.series[i].label);
    CHECK(back.series[i].truth == d.series[i].truth);
  }
  // byte-identical re-serialization
  CHECK(dataset_to_string(back) == text);
}

TEST_CASE("dataset loader rejects malformed input with line numbers") {
  Dataset d = tiny_dataset(7);
  std::string text = dataset_to_string(d);

  SUBCASE("truncated record") {
    std::string broken = text.substr(0, text.size() - 40);
    try {
      dataset_from_string(broken);
      FAIL("expected rejection");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("line") != std::string::npos);
    }
  }
  SUBCASE("wrong value count") {
    auto pos = text.find('\n');
    std::string header = text.substr(0, pos + 1);
    nlohmann::json rec = {{"series_id", "zz"},
                          {"visit", 0},
                          {"time", 0.0},
                          {"values", std::vector<double>(51, 0.0)}};
    std::string broken = header + rec.dump() + "\n";
    try {
      dataset_from_string(broken);
      FAIL("expected rejection");
    } catch (const std::runtime_error& e) {
      std::string msg = e.what();
      CHECK(msg.find("line 2") != std::string::npos);
      CHECK(msg.find("51") != std::string::npos);
    }
  }
  SUBCASE("non-monotone times") {
    auto pos = text.find('\n');
    std::string header = text.substr(0, pos + 1);
    nlohmann::json r1 = {{"series_id", "zz"},
                         {"visit", 0},
                         {"time", 1.0},
                         {"values", std::vector<double>(52, 0.0)}};
    nlohmann::json r2 = {{"series_id", "zz"},
                         {"visit", 1},
                         {"time", 1.0},
                         {"values", std::vector<double>(52, 0.0)}};
    std::string broken = header + r1.dump() + "\n" + r2.dump() + "\n";
    CHECK_THROWS_AS(dataset_from_string(broken), std::runtime_error);
  }
  SUBCASE("bad mask cell count") {
    nlohmann::json header = nlohmann::json::parse(text.substr(0, text.find('\n')));
    std::vector<std::string> mask_lines = {"##", "##"};
    header["mask"] = mask_lines;
    std::string broken = header.dump() + "\n";
    try {
      dataset_from_string(broken);
      FAIL("expected rejection");
    } catch (const std::runtime_error& e) {
      CHECK(std::string(e.what()).find("52") != std::string::npos);
    }
  }
  SUBCASE("unknown version") {
    nlohmann::json header = nlohmann::json::parse(text.substr(0, text.find('\n')));
    header["format_version"] = 42;
    CHECK_THROWS_AS(dataset_from_string(header.dump() + "\n"), std::runtime_error);
  }
}

TEST_CASE("dataset file IO") {
  Dataset d = tiny_dataset(9);
  const std::string path = "test_dataset.stvae";
  save_dataset(path, d);
  Dataset back = load_dataset(path);
  CHECK(dataset_to_string(back) == dataset_to_string(d));
  std::remove(path.c_str());
  CHECK_THROWS_AS(load_dataset("/nonexistent/nowhere.stvae"), std::runtime_error);
}

TEST_CASE("mask file loader") {
  const std::string path = "test_mask.txt";
  {
    std::ofstream f(path);
    for (const auto& line : Mask::standard24_2().to_strings()) f << line << "\n";
  }
  Mask m = load_mask_file(path);
  CHECK(m == Mask::standard24_2());
  std::remove(path.c_str());
}

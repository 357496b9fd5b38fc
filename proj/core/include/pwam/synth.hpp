#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include "pwam/geometry.hpp"
#include "pwam/grid.hpp"

namespace pwam::synth {

// Stateless mixing hash (splitmix64 finalizer). All synthetic data derives
// from it, so generation is reproducible across platforms and needs no
// generator state — handy when values are produced out of order or streamed.
inline std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Uniform double in [0, 1) from (seed, salt, index).
inline double unit_double(std::uint64_t seed, std::uint64_t salt,
                          std::uint64_t index) noexcept {
  const std::uint64_t h = mix64(seed ^ mix64(salt ^ mix64(index)));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// One knot of the piecewise-linear concentration trend; `at` is the position
// along the year range (0 = first year, 1 = last year).
struct TrendAnchor {
  double at = 0.0;
  double level = 0.0;
};

struct ScenarioSpec {
  std::uint64_t seed = 20;
  std::uint32_t nrows = 24;       // coarse grid
  std::uint32_t ncols = 24;
  std::uint32_t refinement = 4;   // fine cells per coarse cell side
  std::uint32_t n_regions = 9;
  std::uint32_t years = 21;
  int start_year = 2000;
  std::vector<TrendAnchor> trend;  // empty = default three-phase shape
  double noise = 0.5;              // per-cell concentration jitter, ± range
  double nodata_fraction = 0.0;    // concentration cells marked nodata
  double zero_population_fraction = 0.05;
  double target = 35.0;
};

// The built-in scenario: a rise from 60 to 70, a plateau peaking at 72 a
// little past midway, and a decline to 34 in the final year, so the series
// first drops below the 35 target in its last year.
ScenarioSpec default_scenario();

// Reads a spec from JSON ({"seed":..,"rows":..,"cols":..,"refinement":..,
// "regions":..,"years":..,"start_year":..,"noise":..,"target":..,
// "nodata_fraction":..,"zero_population_fraction":..,
// "trend":[{"at":..,"level":..},..]}); absent keys keep their defaults.
ScenarioSpec parse_scenario_spec(std::string_view text);

// Trend level at position t in [0, 1] (clamped), linear between anchors.
double trend_level(const std::vector<TrendAnchor>& trend, double t);

struct ScenarioData {
  GridGeometry coarse;
  GridGeometry fine;
  Grid population;                  // fine geometry
  std::vector<Grid> concentration;  // coarse geometry, one per year
  RegionSet regions;                // axis-aligned rectangular partition
  std::vector<int> years;
  // Study-area expectations, computed by direct summation inside the
  // generator (independent of the engine's code paths).
  std::vector<std::optional<double>> expected_pwam;
  std::optional<int> expected_crossing_year;
};

ScenarioData generate(const ScenarioSpec& spec);

// Generates and writes a scenario as engine inputs: regions.geojson,
// population.pwg1, concentration_<year>.pwg1, manifest.json (output_dir
// "out"), and expected.json with the generator's own expectations.
void write_scenario(const ScenarioSpec& spec, const std::filesystem::path& dir);

// Independent reference implementation of the whole chain: centroid
// aggregation, region lookup, and the weighted mean, all as straight loops
// with plain summation. Shares no code with the engine.
struct OracleResult {
  std::vector<std::optional<double>> per_region;  // RegionSet order
  std::optional<double> study_area;               // over all region-assigned cells
};
OracleResult oracle_pwam(const Grid& fine_population, const Grid& concentration,
                         const RegionSet& regions);

struct BenchSpec {
  std::uint32_t rows = 1000;  // coarse grid
  std::uint32_t cols = 1000;
  std::uint32_t refinement = 10;
  std::uint32_t n_regions = 50;
  std::uint64_t seed = 1;
  std::uint32_t years = 3;
  int start_year = 2018;
  std::uint64_t disk_budget_bytes = 8ull << 30;
};

// Writes a large benchmark instance: streamed fine population (PWG1),
// per-year coarse concentrations (PWG1), regions.geojson, and manifest.json
// (threads 4, output_dir "out"). Throws errc::disk_budget_exceeded when the
// estimated footprint does not fit the budget.
void bench_generate(const BenchSpec& spec, const std::filesystem::path& dir);

}  // namespace pwam::synth

#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <vector>

#include <json.hpp>

#include "pwam/aggregate.hpp"
#include "pwam/errors.hpp"
#include "pwam/grid_io.hpp"
#include "pwam/indicator.hpp"
#include "pwam/manifest.hpp"
#include "pwam/membership.hpp"
#include "pwam/pipeline.hpp"
#include "pwam/synth.hpp"
#include "pwam/text.hpp"
#include "support/test_support.hpp"

using namespace pwam;

namespace {

std::string slurp_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "cannot open " << path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

TEST_CASE("generation is deterministic in the scenario spec alone") {
  synth::ScenarioSpec spec = synth::default_scenario();
  spec.seed = 5150;
  spec.nrows = 6;
  spec.ncols = 7;
  spec.refinement = 3;
  spec.n_regions = 4;
  spec.years = 3;
  spec.nodata_fraction = 0.1;
  const synth::ScenarioData a = synth::generate(spec);
  const synth::ScenarioData b = synth::generate(spec);

  CHECK(a.coarse.same_extent(b.coarse));
  CHECK(a.fine.same_extent(b.fine));
  REQUIRE(a.population.values().size() == b.population.values().size());
  for (std::size_t i = 0; i < a.population.values().size(); ++i) {
    CHECK(a.population.values()[i] == b.population.values()[i]);
  }
  REQUIRE(a.concentration.size() == b.concentration.size());
  for (std::size_t y = 0; y < a.concentration.size(); ++y) {
    for (std::size_t i = 0; i < a.concentration[y].values().size(); ++i) {
      CHECK(a.concentration[y].values()[i] == b.concentration[y].values()[i]);
    }
  }
  REQUIRE(a.expected_pwam.size() == b.expected_pwam.size());
  for (std::size_t y = 0; y < a.expected_pwam.size(); ++y) {
    CHECK(a.expected_pwam[y] == b.expected_pwam[y]);
  }
}

TEST_CASE("trend levels interpolate and clamp") {
  const std::vector<synth::TrendAnchor> trend{{0.0, 60.0}, {0.5, 70.0}, {1.0, 30.0}};
  CHECK(synth::trend_level(trend, 0.0) == 60.0);
  CHECK(synth::trend_level(trend, 0.25) == 65.0);
  CHECK(synth::trend_level(trend, 0.5) == 70.0);
  CHECK(synth::trend_level(trend, 0.75) == 50.0);
  CHECK(synth::trend_level(trend, 1.0) == 30.0);
  CHECK(synth::trend_level(trend, -1.0) == 60.0);
  CHECK(synth::trend_level(trend, 2.0) == 30.0);
}

TEST_CASE("flat noiseless trend produces that exact expectation") {
  synth::ScenarioSpec spec = synth::default_scenario();
  spec.seed = 88;
  spec.nrows = 5;
  spec.ncols = 5;
  spec.refinement = 2;
  spec.n_regions = 2;
  spec.years = 3;
  spec.noise = 0.0;
  spec.trend = {{0.0, 42.0}};
  const synth::ScenarioData data = synth::generate(spec);
  for (const auto& expected : data.expected_pwam) {
    REQUIRE(expected.has_value());
    CHECK(*expected == 42.0);
  }
  CHECK_FALSE(data.expected_crossing_year.has_value());  // 42 never drops below 35

  spec.trend = {{0.0, 20.0}};
  const synth::ScenarioData below = synth::generate(spec);
  CHECK(below.expected_crossing_year == spec.start_year);
}

TEST_CASE("refinement 1 with uniform population reduces to the plain mean") {
  synth::ScenarioSpec spec = synth::default_scenario();
  spec.seed = 19;
  spec.nrows = 4;
  spec.ncols = 4;
  spec.refinement = 1;
  spec.n_regions = 1;
  spec.years = 1;
  spec.zero_population_fraction = 0.0;
  const synth::ScenarioData data = synth::generate(spec);

  // replace the population with ones, keeping geometry
  const Grid ones = Grid::filled(data.fine, 1.0);
  const synth::OracleResult oracle =
      synth::oracle_pwam(ones, data.concentration[0], data.regions);
  REQUIRE(oracle.study_area.has_value());

  const auto values = data.concentration[0].values();
  const double mean =
      std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  CHECK(std::abs(*oracle.study_area - mean) <= 1e-12 * std::abs(mean));
}

TEST_CASE("default scenario crosses the target in its final year") {
  const synth::ScenarioSpec spec = synth::default_scenario();
  const synth::ScenarioData data = synth::generate(spec);
  REQUIRE(data.years.size() == 21);
  CHECK(data.years.front() == 2000);
  CHECK(data.years.back() == 2020);
  REQUIRE(data.expected_crossing_year.has_value());
  CHECK(*data.expected_crossing_year == 2020);
  // ... and only in the final year: every earlier expectation sits above it
  for (std::size_t y = 0; y + 1 < data.expected_pwam.size(); ++y) {
    REQUIRE(data.expected_pwam[y].has_value());
    CHECK(*data.expected_pwam[y] >= spec.target);
  }
}

TEST_CASE("oracle agrees with the documented hand instance") {
  GridGeometry g;
  g.ncols = 2;
  g.nrows = 2;
  g.cellsize = 1.0;
  const Grid population(g, {1, 3, 0, 6});
  const Grid concentration(g, {10, 20, 30, 40});
  RegionSet regions;
  Region region;
  region.id = "R";
  region.name = "R";
  Polygon polygon;
  polygon.outer = {{0.0, 0.0}, {2.0, 0.0}, {2.0, 2.0}, {0.0, 2.0}};
  region.polygons.push_back(polygon);
  region.compute_bounds();
  regions.regions.push_back(region);

  const synth::OracleResult oracle = synth::oracle_pwam(population, concentration, regions);
  REQUIRE(oracle.per_region.size() == 1);
  REQUIRE(oracle.per_region[0].has_value());
  CHECK(*oracle.per_region[0] == 31.0);
  CHECK(*oracle.study_area == 31.0);
}

TEST_CASE("engine matches the oracle on random scenarios") {
  for (std::uint64_t seed = 100; seed < 110; ++seed) {
    synth::ScenarioSpec spec = synth::default_scenario();
    spec.seed = seed;
    spec.nrows = 5 + seed % 4;
    spec.ncols = 4 + seed % 5;
    spec.refinement = 1 + seed % 3;
    spec.n_regions = 1 + seed % 4;
    spec.years = 2;
    spec.nodata_fraction = 0.1;
    spec.zero_population_fraction = 0.3;
    const synth::ScenarioData data = synth::generate(spec);

    const Grid population = aggregate_population(data.population, data.coarse);
    const RegionMembership membership = build_membership(data.coarse, data.regions);
    for (std::size_t y = 0; y < data.concentration.size(); ++y) {
      const auto records = compute_all(data.concentration[y], population, membership,
                                       data.regions, data.years[y]);
      const synth::OracleResult oracle =
          synth::oracle_pwam(data.population, data.concentration[y], data.regions);
      REQUIRE(oracle.per_region.size() + 1 == records.size());
      for (std::size_t r = 0; r < oracle.per_region.size(); ++r) {
        REQUIRE(records[r].pwam.has_value() == oracle.per_region[r].has_value());
        if (oracle.per_region[r].has_value()) {
          const double want = *oracle.per_region[r];
          CHECK(std::abs(*records[r].pwam - want) <= 1e-9 * std::max(1.0, std::abs(want)));
        }
      }
      REQUIRE(records.back().pwam.has_value() == oracle.study_area.has_value());
      if (oracle.study_area.has_value()) {
        const double want = *oracle.study_area;
        CHECK(std::abs(*records.back().pwam - want) <=
              1e-9 * std::max(1.0, std::abs(want)));
      }
    }
  }
}

TEST_CASE("spec parsing accepts known keys and rejects others") {
  const synth::ScenarioSpec spec = synth::parse_scenario_spec(R"({
    "seed": 7, "rows": 12, "cols": 10, "refinement": 2, "regions": 5,
    "years": 4, "start_year": 1999, "noise": 0.25, "target": 40,
    "nodata_fraction": 0.02, "zero_population_fraction": 0.1,
    "trend": [{"at": 0, "level": 55}, {"at": 1, "level": 30}]
  })");
  CHECK(spec.seed == 7);
  CHECK(spec.nrows == 12);
  CHECK(spec.ncols == 10);
  CHECK(spec.refinement == 2);
  CHECK(spec.n_regions == 5);
  CHECK(spec.years == 4);
  CHECK(spec.start_year == 1999);
  CHECK(spec.noise == 0.25);
  CHECK(spec.target == 40.0);
  CHECK(spec.trend.size() == 2);
  CHECK(spec.trend[1].level == 30.0);

  try {
    synth::parse_scenario_spec(R"({"rows": 4, "volume": 11})");
    FAIL("expected SchemaViolation");
  } catch (const Error& e) {
    CHECK(e.code() == errc::schema_violation);
  }
}

TEST_CASE("written scenarios can be loaded and run") {
  synth::ScenarioSpec spec = synth::default_scenario();
  spec.seed = 64;
  spec.nrows = 8;
  spec.ncols = 8;
  spec.refinement = 2;
  spec.n_regions = 4;
  spec.years = 2;
  const testsup::TempDir dir;
  synth::write_scenario(spec, dir.path());

  CHECK(std::filesystem::exists(dir.path() / "regions.geojson"));
  CHECK(std::filesystem::exists(dir.path() / "population.pwg1"));
  CHECK(std::filesystem::exists(dir.path() / "concentration_2000.pwg1"));
  CHECK(std::filesystem::exists(dir.path() / "concentration_2001.pwg1"));
  CHECK(std::filesystem::exists(dir.path() / "expected.json"));

  const RunManifest manifest = load_manifest_file(dir.path() / "manifest.json");
  const RunResult result = compute_run(manifest);
  const auto expected = nlohmann::json::parse(slurp_file(dir.path() / "expected.json"));
  CHECK(expected.at("seed").get<std::uint64_t>() == 64);
  const auto& pwam_json = expected.at("expected_pwam");
  for (std::size_t y = 0; y < result.years.size(); ++y) {
    const IndicatorRecord* study = result.study_area(result.years[y]);
    REQUIRE(study != nullptr);
    REQUIRE(study->pwam.has_value());
    const double want = pwam_json[y].get<double>();
    CHECK(std::abs(*study->pwam - want) <= 1e-9 * std::max(1.0, std::abs(want)));
  }
}

TEST_CASE("bench generation is reproducible and self-consistent") {
  synth::BenchSpec spec;
  spec.rows = 10;
  spec.cols = 10;
  spec.refinement = 2;
  spec.n_regions = 2;
  spec.seed = 7;
  spec.years = 2;

  const testsup::TempDir a;
  synth::bench_generate(spec, a.path());
  const RunManifest manifest = load_manifest_file(a.path() / "manifest.json");
  CHECK(manifest.threads == 4);
  const RunResult result = compute_run(manifest);
  CHECK(result.years == std::vector<int>{2018, 2019});
  for (const int year : result.years) {
    const IndicatorRecord* study = result.study_area(year);
    REQUIRE(study != nullptr);
    CHECK(study->pwam.has_value());
    CHECK(study->total_population > 0.0);
  }

  SUBCASE("identical arguments give bit-identical files") {
    const testsup::TempDir b;
    synth::bench_generate(spec, b.path());
    for (const auto& entry : std::filesystem::directory_iterator(a.path())) {
      const auto name = entry.path().filename();
      CHECK(fnv1a64_file(entry.path()) == fnv1a64_file(b.path() / name));
    }
  }
  SUBCASE("population mass survives aggregation at refinement 2") {
    const GridFileInfo fine = probe_grid_file(a.path() / "population.pwg1");
    const Grid population = read_grid_file(a.path() / "population.pwg1");
    const GridFileInfo coarse = probe_grid_file(a.path() / "concentration_2018.pwg1");
    const Grid aggregated = aggregate_population(population, coarse.geometry);
    long double fine_total = 0.0L;
    for (const double v : population.values()) fine_total += v;
    long double coarse_total = 0.0L;
    for (const double v : aggregated.values()) coarse_total += v;
    CHECK(fine.geometry.ncols == 20);
    const double relative =
        std::abs(static_cast<double>(coarse_total - fine_total)) /
        static_cast<double>(fine_total);
    CHECK(relative <= 1e-12);
  }
}

TEST_CASE("bench generation refuses an impossible disk budget") {
  synth::BenchSpec spec;
  spec.rows = 100;
  spec.cols = 100;
  spec.refinement = 4;
  spec.disk_budget_bytes = 1024;  // far below the ~1.3 MB this needs
  const testsup::TempDir dir;
  try {
    synth::bench_generate(spec, dir.path());
    FAIL("expected DiskBudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == errc::disk_budget_exceeded);
  }
}

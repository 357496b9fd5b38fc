#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pwam/charts.hpp"
#include "pwam/csv.hpp"
#include "pwam/errors.hpp"
#include "pwam/geojson.hpp"
#include "pwam/grid_io.hpp"
#include "pwam/manifest.hpp"
#include "pwam/pipeline.hpp"
#include "pwam/synth.hpp"
#include "pwam/text.hpp"
#include "pwam/version.hpp"
#include "support/test_support.hpp"

using namespace pwam;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "cannot open " << path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

std::vector<std::string> csv_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string line;
  std::istringstream in(text);
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split_csv(const std::string& line) {
  // Good enough for our own output: fields never contain quoted commas in
  // these fixtures.
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

Region rectangle_region(const std::string& id, const std::string& name, double x0,
                        double y0, double x1, double y1) {
  Region region;
  region.id = id;
  region.name = name;
  Polygon polygon;
  polygon.outer = {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
  region.polygons.push_back(polygon);
  region.compute_bounds();
  return region;
}

// One city covering a 2x2 grid of unit cells; two years of uniform
// concentration (50 then 30) over unit population.
struct TinyFixture {
  testsup::TempDir dir;
  std::filesystem::path manifest_path;

  TinyFixture() {
    RegionSet regions;
    regions.regions.push_back(
        rectangle_region("city-1", "City One", 0.0, 0.0, 2.0, 2.0));
    std::ofstream(dir.path() / "regions.geojson") << emit_geojson(regions);

    GridGeometry g;
    g.ncols = 2;
    g.nrows = 2;
    g.cellsize = 1.0;
    write_grid_file(Grid::filled(g, 1.0), dir.path() / "population.asc");
    write_grid_file(Grid::filled(g, 50.0), dir.path() / "conc_2000.asc");
    write_grid_file(Grid::filled(g, 30.0), dir.path() / "conc_2001.asc");

    std::ofstream(dir.path() / "manifest.json") << R"({
      "regions": "regions.geojson",
      "population": {"2000": "population.asc", "2001": "population.asc"},
      "concentration": {"2000": "conc_2000.asc", "2001": "conc_2001.asc"},
      "output_dir": "out"
    })";
    manifest_path = dir.path() / "manifest.json";
  }
};

}  // namespace

TEST_CASE("load_manifest applies defaults and resolves relative paths") {
  const TinyFixture fx;
  const RunManifest manifest = load_manifest_file(fx.manifest_path);
  CHECK(manifest.breaks == std::vector<double>{35.0, 50.0, 75.0, 100.0});
  CHECK(manifest.target == 35.0);
  CHECK(manifest.threads == 1);
  CHECK(manifest.regions_path == fx.dir.path() / "regions.geojson");
  CHECK(manifest.population_paths.at(2001) == fx.dir.path() / "population.asc");
  CHECK(manifest.concentration_paths.size() == 2);
  CHECK(manifest.output_dir == fx.dir.path() / "out");
}

TEST_CASE("load_manifest rejects structural problems") {
  const std::string base = R"({
    "regions": "r.geojson",
    "population": {"2000": "p.asc"},
    "concentration": {"2000": "c.asc", "2001": "c.asc"}
  })";

  SUBCASE("concentration year without population mapping") {
    try {
      load_manifest(base);
      FAIL("expected MissingYearMapping");
    } catch (const Error& e) {
      CHECK(e.code() == errc::missing_year_mapping);
      CHECK(std::string(e.what()).find("2001") != std::string::npos);
    }
  }
  SUBCASE("non-ascending breaks") {
    const std::string text = R"({
      "regions": "r.geojson",
      "population": {"2000": "p.asc"},
      "concentration": {"2000": "c.asc"},
      "output_dir": "out",
      "breaks": [50, 35]
    })";
    try {
      load_manifest(text);
      FAIL("expected NonAscendingBreaks");
    } catch (const Error& e) {
      CHECK(e.code() == errc::non_ascending_breaks);
    }
  }
  SUBCASE("unknown key carries a JSON pointer") {
    const std::string text = R"({
      "regions": "r.geojson",
      "population": {"2000": "p.asc"},
      "concentration": {"2000": "c.asc"},
      "bogus": 1
    })";
    try {
      load_manifest(text);
      FAIL("expected SchemaViolation");
    } catch (const Error& e) {
      CHECK(e.code() == errc::schema_violation);
      CHECK(std::string(e.what()).find("/bogus") != std::string::npos);
    }
  }
  SUBCASE("bad year key") {
    const std::string text = R"({
      "regions": "r.geojson",
      "population": {"x2000": "p.asc"},
      "concentration": {"2000": "c.asc"}
    })";
    try {
      load_manifest(text);
      FAIL("expected SchemaViolation");
    } catch (const Error& e) {
      CHECK(e.code() == errc::schema_violation);
    }
  }
}

TEST_CASE("end-to-end run on the tiny fixture") {
  const TinyFixture fx;
  const RunManifest manifest = load_manifest_file(fx.manifest_path);
  const RunResult result = run(manifest);

  REQUIRE(result.years == std::vector<int>{2000, 2001});
  REQUIRE(result.records.size() == 4);  // (1 city + __ALL__) x 2 years
  CHECK(result.records[0].region_id == "city-1");
  REQUIRE(result.records[0].pwam.has_value());
  CHECK(*result.records[0].pwam == 50.0);
  CHECK(result.records[0].total_population == 4.0);
  CHECK(result.records[1].region_id == kStudyAreaId);
  CHECK(*result.records[2].pwam == 30.0);
  CHECK(result.crossing_year == 2001);

  const std::filesystem::path out = manifest.output_dir;
  CHECK(slurp(out / "study_area_timeseries.csv") ==
        "year,pwam,total_population\n2000,50,4\n2001,30,4\n");
  CHECK(slurp(out / "city_indicators.csv") ==
        "region_id,name,year,pwam,total_population,interval_label\n"
        "city-1,City One,2000,50,4,50-75\n"
        "city-1,City One,2001,30,4,0-35\n");
  CHECK(slurp(out / "interval_shares.csv") ==
        "year,0-35,35-50,50-75,75-100,>100,classified_population\n"
        "2000,0,0,1,0,0,4\n"
        "2001,1,0,0,0,0,4\n");
  CHECK(slurp(out / "target_attainment.csv") ==
        "year,cities_below_target,population_share_below_target\n"
        "2000,0,0\n"
        "2001,1,1\n");

  const auto provenance = nlohmann::json::parse(slurp(out / "provenance.json"));
  CHECK(provenance.at("engine_version").get<std::string>() == std::string(kVersion));
  CHECK(provenance.at("inputs").size() == 4);  // regions + population + 2 years
  for (const auto& entry : provenance.at("inputs")) {
    const std::string digest = entry.at("fnv1a64").get<std::string>();
    CHECK(digest.size() == 16);
    const std::string path = entry.at("path").get<std::string>();
    CHECK(to_hex(fnv1a64_file(path)) == digest);
  }

  SUBCASE("a second run reproduces every output byte for byte") {
    std::map<std::string, std::uint64_t> digests;
    for (const auto& entry : std::filesystem::directory_iterator(out)) {
      digests[entry.path().filename().string()] = fnv1a64_file(entry.path());
    }
    REQUIRE(digests.size() == 7);
    run(manifest);
    for (const auto& [name, digest] : digests) {
      CHECK(fnv1a64_file(out / name) == digest);
    }
  }
}

TEST_CASE("scenario run: completeness and CSV cross-checks") {
  synth::ScenarioSpec spec = synth::default_scenario();
  spec.seed = 909;
  spec.nrows = 10;
  spec.ncols = 10;
  spec.refinement = 2;
  spec.n_regions = 5;
  spec.years = 4;
  spec.nodata_fraction = 0.05;
  const testsup::TempDir dir;
  synth::write_scenario(spec, dir.path());
  const RunManifest manifest = load_manifest_file(dir.path() / "manifest.json");
  const RunResult result = run(manifest);

  const RegionSet regions = parse_geojson_file(manifest.regions_path);
  REQUIRE(result.records.size() == spec.years * (regions.regions.size() + 1));

  // every (region, year) pair appears exactly once, years ascending
  std::map<std::pair<int, std::string>, std::size_t> seen;
  for (const IndicatorRecord& r : result.records) ++seen[{r.year, r.region_id}];
  CHECK(seen.size() == result.records.size());

  // the generator's own long-double expectation for the study area
  const auto expected = nlohmann::json::parse(slurp(dir.path() / "expected.json"));
  const auto& expected_pwam = expected.at("expected_pwam");
  REQUIRE(expected_pwam.size() == spec.years);
  for (std::size_t i = 0; i < result.years.size(); ++i) {
    const IndicatorRecord* study = result.study_area(result.years[i]);
    REQUIRE(study != nullptr);
    if (expected_pwam[i].is_null()) {
      CHECK_FALSE(study->pwam.has_value());
    } else {
      REQUIRE(study->pwam.has_value());
      const double want = expected_pwam[i].get<double>();
      CHECK(std::abs(*study->pwam - want) <= 1e-9 * std::max(1.0, std::abs(want)));
    }
  }

  // interval_shares.csv must reconcile against city_indicators.csv
  const auto shares_lines = csv_lines(slurp(manifest.output_dir / "interval_shares.csv"));
  const auto city_lines = csv_lines(slurp(manifest.output_dir / "city_indicators.csv"));
  REQUIRE(shares_lines.size() == 1 + spec.years);
  REQUIRE(city_lines.size() == 1 + spec.years * regions.regions.size());

  const std::size_t nintervals = result.scheme.interval_count();
  for (std::size_t yi = 0; yi < result.years.size(); ++yi) {
    const auto fields = split_csv(shares_lines[1 + yi]);
    REQUIRE(fields.size() == 2 + nintervals);
    const double classified = std::stod(fields.back());

    // rebuild bucket populations from the city rows
    std::vector<double> bucket(nintervals, 0.0);
    double total = 0.0;
    for (std::size_t ci = 1; ci < city_lines.size(); ++ci) {
      const auto row = split_csv(city_lines[ci]);
      REQUIRE(row.size() == 6);
      if (std::stoi(row[2]) != result.years[yi]) continue;
      if (row[3] == "NA") {
        CHECK(row[5] == "NA");
        continue;
      }
      const double population = std::stod(row[4]);
      bucket[classify(std::stod(row[3]), result.scheme)] += population;
      total += population;
    }
    // both sides pass through 6-significant-digit rendering, so allow 1e-5
    CHECK(std::abs(classified - total) <= 1e-5 * std::max(1.0, total));
    for (std::size_t j = 0; j < nintervals; ++j) {
      const double share = std::stod(fields[1 + j]);
      const double want = total > 0.0 ? bucket[j] / total : 0.0;
      CHECK(std::abs(share - want) <= 1e-5);
    }
  }

  // target_attainment.csv must agree with a recomputation from the records
  const auto attain_lines =
      csv_lines(slurp(manifest.output_dir / "target_attainment.csv"));
  REQUIRE(attain_lines.size() == 1 + spec.years);
  for (std::size_t yi = 0; yi < result.years.size(); ++yi) {
    const auto fields = split_csv(attain_lines[1 + yi]);
    REQUIRE(fields.size() == 3);
    std::uint64_t count = 0;
    double below = 0.0;
    double defined = 0.0;
    for (const IndicatorRecord& r : result.records) {
      if (r.year != result.years[yi] || r.region_id == kStudyAreaId) continue;
      if (!r.pwam.has_value()) continue;
      defined += r.total_population;
      if (*r.pwam < result.target) {
        ++count;
        below += r.total_population;
      }
    }
    CHECK(std::stoull(fields[1]) == count);
    const double share = defined > 0.0 ? below / defined : 0.0;
    CHECK(std::abs(std::stod(fields[2]) - share) <= 1e-6);
  }
}

TEST_CASE("charts are well-formed SVG with the contracted structure") {
  synth::ScenarioSpec spec = synth::default_scenario();
  spec.seed = 31;
  spec.nrows = 12;
  spec.ncols = 12;
  spec.refinement = 2;
  spec.n_regions = 6;
  const testsup::TempDir dir;
  synth::write_scenario(spec, dir.path());
  const RunManifest manifest = load_manifest_file(dir.path() / "manifest.json");
  const RunResult result = compute_run(manifest);

  const std::string timeseries = render_timeseries_svg(result);
  const std::string shares = render_shares_svg(result);

  std::string why;
  CHECK_MESSAGE(testsup::xml_well_formed(timeseries, &why), why);
  CHECK_MESSAGE(testsup::xml_well_formed(shares, &why), why);

  // exactly one reference line per document
  const std::string needle = "class=\"reference-line\"";
  std::size_t count = 0;
  for (std::size_t pos = timeseries.find(needle); pos != std::string::npos;
       pos = timeseries.find(needle, pos + 1)) {
    ++count;
  }
  CHECK(count == 1);
  CHECK(shares.find(needle) == std::string::npos);

  // the polyline carries one x-ordered point per defined study-area year
  std::size_t defined_years = 0;
  for (const int year : result.years) {
    const IndicatorRecord* study = result.study_area(year);
    if (study && study->pwam.has_value()) ++defined_years;
  }
  CHECK(defined_years == 21);
  const std::size_t poly_at = timeseries.find("<polyline points=\"");
  REQUIRE(poly_at != std::string::npos);
  const std::size_t open = timeseries.find('"', poly_at) + 1;
  const std::size_t close = timeseries.find('"', open);
  std::istringstream points(timeseries.substr(open, close - open));
  std::string pair;
  std::size_t npoints = 0;
  double previous_x = -1e300;
  while (points >> pair) {
    const std::size_t comma = pair.find(',');
    REQUIRE(comma != std::string::npos);
    const double x = std::stod(pair.substr(0, comma));
    CHECK(x > previous_x);
    previous_x = x;
    ++npoints;
  }
  CHECK(npoints == defined_years);

  // each stacked bar spans the full plot height (shares close to 1)
  struct Rect {
    double x, width, height;
  };
  std::vector<Rect> bars;
  for (std::size_t pos = shares.find("<rect "); pos != std::string::npos;
       pos = shares.find("<rect ", pos + 1)) {
    const std::size_t end = shares.find("/>", pos);
    const std::string tag = shares.substr(pos, end - pos);
    const auto attr = [&](const char* name) {
      const std::string key = std::string(name) + "=\"";
      const std::size_t at = tag.find(key);
      REQUIRE(at != std::string::npos);
      return std::stod(tag.substr(at + key.size()));
    };
    const double width = attr("width");
    if (width == 800.0 || width == 13.0) continue;  // canvas, legend swatch
    bars.push_back({attr("x"), width, attr("height")});
  }
  REQUIRE_FALSE(bars.empty());
  std::map<double, double> stacked_height;
  for (const Rect& r : bars) stacked_height[r.x] += r.height;
  CHECK(stacked_height.size() == 21);  // one stack per year
  const double plot_height = 500.0 - 64.0 - 96.0;
  for (const auto& [x, total] : stacked_height) {
    CHECK(std::abs(total - plot_height) <= 0.5);
  }
}

TEST_CASE("validate_run collects problems instead of failing fast") {
  const TinyFixture fx;

  SUBCASE("healthy inputs pass") {
    const ValidationReport report = validate_run(load_manifest_file(fx.manifest_path));
    CHECK(report.ok);
    CHECK(report.errors.empty());
    CHECK(report.region_count == 1);
    CHECK(report.years == std::vector<int>{2000, 2001});
    // regions + population per year (same file listed twice) + 2 concentrations
    REQUIRE(report.files.size() == 5);
    for (const FileCheck& f : report.files) CHECK(f.ok);
    CHECK(report.regions_without_coverage.empty());
    CHECK(report.estimated_peak_bytes > 0);
    const std::string text = format_report(report);
    CHECK(text.find("validation passed") != std::string::npos);
  }
  SUBCASE("a region outside the raster is reported as uncovered") {
    RegionSet regions;
    regions.regions.push_back(
        rectangle_region("city-1", "City One", 0.0, 0.0, 2.0, 2.0));
    regions.regions.push_back(
        rectangle_region("faraway", "Faraway", 100.0, 100.0, 101.0, 101.0));
    std::ofstream(fx.dir.path() / "regions.geojson") << emit_geojson(regions);
    const ValidationReport report = validate_run(load_manifest_file(fx.manifest_path));
    CHECK(report.ok);  // coverage gaps warn, they do not invalidate
    REQUIRE(report.regions_without_coverage.size() == 1);
    CHECK(report.regions_without_coverage[0] == "faraway");
  }
  SUBCASE("one corrupt grid is pinpointed while the rest still verify") {
    std::ofstream(fx.dir.path() / "conc_2001.asc", std::ios::trunc) << "not a grid";
    const ValidationReport report = validate_run(load_manifest_file(fx.manifest_path));
    CHECK_FALSE(report.ok);
    CHECK(report.errors.size() == 1);
    std::size_t ok_files = 0;
    std::size_t bad_files = 0;
    for (const FileCheck& f : report.files) {
      if (f.ok) {
        ++ok_files;
      } else {
        ++bad_files;
        CHECK(f.path.find("conc_2001.asc") != std::string::npos);
      }
    }
    CHECK(ok_files == 4);
    CHECK(bad_files == 1);
    CHECK(format_report(report).find("validation FAILED") != std::string::npos);
  }
  SUBCASE("missing regions file") {
    std::filesystem::remove(fx.dir.path() / "regions.geojson");
    const ValidationReport report = validate_run(load_manifest_file(fx.manifest_path));
    CHECK_FALSE(report.ok);
    CHECK_FALSE(report.errors.empty());
  }
}

TEST_CASE("compute errors carry the year and file context") {
  const TinyFixture fx;
  std::ofstream(fx.dir.path() / "conc_2001.asc", std::ios::trunc) << "not a grid";
  try {
    run(load_manifest_file(fx.manifest_path));
    FAIL("expected a parse failure");
  } catch (const Error& e) {
    const std::string what = e.what();
    CHECK(what.find("year 2001") != std::string::npos);
    CHECK(what.find("conc_2001.asc") != std::string::npos);
  }
}

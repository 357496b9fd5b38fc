#include "pwam/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "pwam/errors.hpp"
#include "pwam/geojson.hpp"
#include "pwam/grid_io.hpp"

namespace pwam::synth {

namespace {

using nlohmann::json;

// Salts for the independent random streams of one scenario.
constexpr std::uint64_t kSaltOrigin = 0x01;
constexpr std::uint64_t kSaltPopulationZero = 0x02;
constexpr std::uint64_t kSaltPopulationLevel = 0x03;
constexpr std::uint64_t kSaltConcentration = 0x100;  // + year index
constexpr std::uint64_t kSaltNodata = 0x200;         // + year index

// An axis-aligned rectangle of whole coarse cells.
struct CellRect {
  std::uint32_t row0, row1;  // [row0, row1)
  std::uint32_t col0, col1;  // [col0, col1)
};

// Splits an nrows x ncols grid into `n` rectangles that tile it exactly:
// near-square bands of rows, each band cut into near-equal column runs.
std::vector<CellRect> partition_rects(std::uint32_t nrows, std::uint32_t ncols,
                                      std::uint32_t n) {
  std::uint32_t bands = static_cast<std::uint32_t>(
      std::clamp(std::llround(std::sqrt(static_cast<double>(n))), 1ll,
                 static_cast<long long>(std::min(n, nrows))));
  while ((n + bands - 1) / bands > ncols) ++bands;

  std::vector<CellRect> rects;
  rects.reserve(n);
  for (std::uint32_t b = 0; b < bands; ++b) {
    const std::uint32_t count = n / bands + (b < n % bands ? 1 : 0);
    const std::uint32_t row0 = static_cast<std::uint32_t>(
        static_cast<std::uint64_t>(b) * nrows / bands);
    const std::uint32_t row1 = static_cast<std::uint32_t>(
        static_cast<std::uint64_t>(b + 1) * nrows / bands);
    for (std::uint32_t j = 0; j < count; ++j) {
      const std::uint32_t col0 = static_cast<std::uint32_t>(
          static_cast<std::uint64_t>(j) * ncols / count);
      const std::uint32_t col1 = static_cast<std::uint32_t>(
          static_cast<std::uint64_t>(j + 1) * ncols / count);
      rects.push_back(CellRect{row0, row1, col0, col1});
    }
  }
  return rects;
}

RegionSet rects_to_regions(const std::vector<CellRect>& rects,
                           const GridGeometry& coarse) {
  int width = 1;
  for (std::size_t n = rects.size(); n >= 10; n /= 10) ++width;

  RegionSet set;
  for (std::size_t i = 0; i < rects.size(); ++i) {
    const CellRect& r = rects[i];
    const double x0 = coarse.xll + r.col0 * coarse.cellsize;
    const double x1 = coarse.xll + r.col1 * coarse.cellsize;
    // Row 0 is north: rect rows [row0, row1) span y in
    // [yll + (nrows-row1)*cs, yll + (nrows-row0)*cs).
    const double y0 = coarse.yll + (coarse.nrows - r.row1) * coarse.cellsize;
    const double y1 = coarse.yll + (coarse.nrows - r.row0) * coarse.cellsize;

    Region region;
    std::string number = std::to_string(i + 1);
    while (static_cast<int>(number.size()) < width) number.insert(number.begin(), '0');
    region.id = "R" + number;
    region.name = "Region " + std::to_string(i + 1);
    Polygon polygon;
    polygon.outer = Ring{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}};
    region.polygons.push_back(std::move(polygon));
    region.compute_bounds();
    set.regions.push_back(std::move(region));
  }
  return set;
}

void validate_spec(const ScenarioSpec& spec) {
  if (spec.nrows < 1 || spec.ncols < 1 || spec.refinement < 1 || spec.years < 1 ||
      spec.n_regions < 1) {
    raise(errc::schema_violation,
          "at /: scenario sizes must all be at least 1");
  }
  if (static_cast<std::uint64_t>(spec.n_regions) >
      static_cast<std::uint64_t>(spec.nrows) * spec.ncols) {
    raise(errc::schema_violation, "at /regions: more regions than coarse cells");
  }
  if (!(spec.noise >= 0.0) || !(spec.nodata_fraction >= 0.0) ||
      spec.nodata_fraction > 1.0 || !(spec.zero_population_fraction >= 0.0) ||
      spec.zero_population_fraction > 1.0) {
    raise(errc::schema_violation, "at /: fractions must lie in [0, 1], noise >= 0");
  }
}

std::vector<TrendAnchor> effective_trend(const ScenarioSpec& spec) {
  if (!spec.trend.empty()) return spec.trend;
  return default_scenario().trend;
}

double concentration_value(const ScenarioSpec& spec, double level, std::uint64_t year_index,
                           std::uint64_t cell_index) {
  const double u = unit_double(spec.seed, kSaltConcentration + year_index, cell_index);
  return std::max(0.0, level + spec.noise * (2.0 * u - 1.0));
}

double population_value(const ScenarioSpec& spec, std::uint64_t cell_index) {
  if (spec.zero_population_fraction > 0.0 &&
      unit_double(spec.seed, kSaltPopulationZero, cell_index) <
          spec.zero_population_fraction) {
    return 0.0;
  }
  return 100.0 * unit_double(spec.seed, kSaltPopulationLevel, cell_index);
}

}  // namespace

ScenarioSpec default_scenario() {
  ScenarioSpec spec;
  spec.trend = {{0.0, 60.0}, {0.15, 70.0}, {0.55, 72.0}, {1.0, 34.0}};
  return spec;
}

double trend_level(const std::vector<TrendAnchor>& trend, double t) {
  if (trend.empty()) return 0.0;
  if (t <= trend.front().at) return trend.front().level;
  if (t >= trend.back().at) return trend.back().level;
  for (std::size_t i = 1; i < trend.size(); ++i) {
    if (t <= trend[i].at) {
      const TrendAnchor& a = trend[i - 1];
      const TrendAnchor& b = trend[i];
      const double span = b.at - a.at;
      if (span <= 0.0) return b.level;
      return a.level + (b.level - a.level) * (t - a.at) / span;
    }
  }
  return trend.back().level;
}

ScenarioSpec parse_scenario_spec(std::string_view text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    raise(errc::schema_violation, "at /: scenario spec is not a JSON object");
  }
  ScenarioSpec spec = default_scenario();
  for (const auto& [key, value] : doc.items()) {
    const std::string pointer = "/" + key;
    const auto need_number = [&]() {
      if (!value.is_number()) {
        raise(errc::schema_violation, "at " + pointer + ": expected a number");
      }
    };
    if (key == "seed") {
      need_number();
      spec.seed = value.get<std::uint64_t>();
    } else if (key == "rows") {
      need_number();
      spec.nrows = value.get<std::uint32_t>();
    } else if (key == "cols") {
      need_number();
      spec.ncols = value.get<std::uint32_t>();
    } else if (key == "refinement") {
      need_number();
      spec.refinement = value.get<std::uint32_t>();
    } else if (key == "regions") {
      need_number();
      spec.n_regions = value.get<std::uint32_t>();
    } else if (key == "years") {
      need_number();
      spec.years = value.get<std::uint32_t>();
    } else if (key == "start_year") {
      need_number();
      spec.start_year = value.get<int>();
    } else if (key == "noise") {
      need_number();
      spec.noise = value.get<double>();
    } else if (key == "target") {
      need_number();
      spec.target = value.get<double>();
    } else if (key == "nodata_fraction") {
      need_number();
      spec.nodata_fraction = value.get<double>();
    } else if (key == "zero_population_fraction") {
      need_number();
      spec.zero_population_fraction = value.get<double>();
    } else if (key == "trend") {
      if (!value.is_array() || value.empty()) {
        raise(errc::schema_violation, "at /trend: expected a non-empty array");
      }
      std::vector<TrendAnchor> trend;
      double previous_at = -1.0;
      for (std::size_t i = 0; i < value.size(); ++i) {
        const json& anchor = value[i];
        if (!anchor.is_object() || !anchor.contains("at") || !anchor.contains("level") ||
            !anchor["at"].is_number() || !anchor["level"].is_number()) {
          raise(errc::schema_violation,
                "at /trend/" + std::to_string(i) + ": expected {\"at\", \"level\"}");
        }
        const double at = anchor["at"].get<double>();
        if (at < 0.0 || at > 1.0 || at <= previous_at) {
          raise(errc::schema_violation, "at /trend/" + std::to_string(i) +
                                            "/at: anchors must ascend within [0, 1]");
        }
        previous_at = at;
        trend.push_back(TrendAnchor{at, anchor["level"].get<double>()});
      }
      spec.trend = std::move(trend);
    } else {
      raise(errc::schema_violation, "at " + pointer + ": unknown field");
    }
  }
  validate_spec(spec);
  return spec;
}

ScenarioData generate(const ScenarioSpec& spec) {
  validate_spec(spec);
  ScenarioData data;

  // Origin snapped to eighths and a cellsize from a power-of-two-friendly
  // set keep region boundaries exactly representable.
  const double cellsize_choices[] = {0.25, 0.5, 1.0, 2.0};
  data.coarse.ncols = spec.ncols;
  data.coarse.nrows = spec.nrows;
  data.coarse.cellsize = cellsize_choices[mix64(spec.seed ^ kSaltOrigin) % 4];
  data.coarse.xll =
      std::floor(unit_double(spec.seed, kSaltOrigin, 1) * 1600.0 - 800.0) / 8.0;
  data.coarse.yll =
      std::floor(unit_double(spec.seed, kSaltOrigin, 2) * 1600.0 - 800.0) / 8.0;
  data.coarse.nodata = kDefaultNodata;

  data.fine = data.coarse;
  data.fine.ncols = spec.ncols * spec.refinement;
  data.fine.nrows = spec.nrows * spec.refinement;
  data.fine.cellsize = data.coarse.cellsize / static_cast<double>(spec.refinement);

  const std::vector<CellRect> rects =
      partition_rects(spec.nrows, spec.ncols, spec.n_regions);
  data.regions = rects_to_regions(rects, data.coarse);

  // Fine population.
  {
    std::vector<double> values(data.fine.cell_count());
    for (std::size_t i = 0; i < values.size(); ++i) {
      values[i] = population_value(spec, i);
    }
    data.population = Grid(data.fine, std::move(values));
  }

  // Per-year concentrations.
  const std::vector<TrendAnchor> trend = effective_trend(spec);
  for (std::uint32_t y = 0; y < spec.years; ++y) {
    const double t =
        spec.years == 1 ? 1.0 : static_cast<double>(y) / (spec.years - 1);
    const double level = trend_level(trend, t);
    std::vector<double> values(data.coarse.cell_count());
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (spec.nodata_fraction > 0.0 &&
          unit_double(spec.seed, kSaltNodata + y, i) < spec.nodata_fraction) {
        values[i] = data.coarse.nodata;
      } else {
        values[i] = concentration_value(spec, level, y, i);
      }
    }
    data.concentration.push_back(Grid(data.coarse, std::move(values)));
    data.years.push_back(spec.start_year + static_cast<int>(y));
  }

  // Expected study-area pwam by direct long-double summation over fine
  // cells; the rectangles tile the grid, so every coarse cell is assigned.
  for (std::uint32_t y = 0; y < spec.years; ++y) {
    const Grid& concentration = data.concentration[y];
    long double numerator = 0.0L;
    long double denominator = 0.0L;
    for (std::uint32_t fr = 0; fr < data.fine.nrows; ++fr) {
      for (std::uint32_t fc = 0; fc < data.fine.ncols; ++fc) {
        const std::size_t fi = static_cast<std::size_t>(fr) * data.fine.ncols + fc;
        const double p = data.population[fi];
        // Fine cell center -> coarse cell, by the same floor convention the
        // grid module documents.
        const double x =
            data.fine.xll + (static_cast<double>(fc) + 0.5) * data.fine.cellsize;
        const double yy = data.fine.yll +
                          (static_cast<double>(data.fine.nrows - fr) - 0.5) *
                              data.fine.cellsize;
        const double fcolf = std::floor((x - data.coarse.xll) / data.coarse.cellsize);
        const double frowf = std::floor((yy - data.coarse.yll) / data.coarse.cellsize);
        if (!(fcolf >= 0.0 && fcolf < static_cast<double>(data.coarse.ncols) &&
              frowf >= 0.0 && frowf < static_cast<double>(data.coarse.nrows))) {
          continue;
        }
        const std::uint32_t crow =
            data.coarse.nrows - 1 - static_cast<std::uint32_t>(frowf);
        const std::size_t ci = static_cast<std::size_t>(crow) * data.coarse.ncols +
                               static_cast<std::uint32_t>(fcolf);
        if (!concentration.valid(ci)) continue;
        numerator += static_cast<long double>(p) * concentration[ci];
        denominator += p;
      }
    }
    if (denominator > 0.0L) {
      data.expected_pwam.push_back(static_cast<double>(numerator / denominator));
    } else {
      data.expected_pwam.push_back(std::nullopt);
    }
  }
  for (std::uint32_t y = 0; y < spec.years; ++y) {
    if (data.expected_pwam[y].has_value() && *data.expected_pwam[y] < spec.target) {
      data.expected_crossing_year = data.years[y];
      break;
    }
  }
  return data;
}

void write_scenario(const ScenarioSpec& spec, const std::filesystem::path& dir) {
  const ScenarioData data = generate(spec);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    raise(errc::output_unwritable,
          "cannot create directory '" + dir.string() + "': " + ec.message());
  }

  const auto write_text = [&](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
      raise(errc::output_unwritable, "write failure on '" + path.string() + "'");
    }
  };

  write_text(dir / "regions.geojson", emit_geojson(data.regions));
  write_grid_file(data.population, dir / "population.pwg1");

  json population_map = json::object();
  json concentration_map = json::object();
  for (std::size_t y = 0; y < data.years.size(); ++y) {
    const std::string year = std::to_string(data.years[y]);
    const std::string conc_name = "concentration_" + year + ".pwg1";
    write_grid_file(data.concentration[y], dir / conc_name);
    population_map[year] = "population.pwg1";
    concentration_map[year] = conc_name;
  }

  const json manifest{{"regions", "regions.geojson"},
                      {"population", population_map},
                      {"concentration", concentration_map},
                      {"target", spec.target},
                      {"output_dir", "out"}};
  write_text(dir / "manifest.json", manifest.dump(2) + "\n");

  json expected_series = json::array();
  for (const auto& pwam : data.expected_pwam) {
    if (pwam.has_value()) {
      expected_series.push_back(*pwam);
    } else {
      expected_series.push_back(nullptr);
    }
  }
  json expected{{"seed", spec.seed},
                {"years", data.years},
                {"expected_pwam", expected_series},
                {"target", spec.target}};
  if (data.expected_crossing_year.has_value()) {
    expected["expected_crossing_year"] = *data.expected_crossing_year;
  } else {
    expected["expected_crossing_year"] = nullptr;
  }
  write_text(dir / "expected.json", expected.dump(2) + "\n");
}

OracleResult oracle_pwam(const Grid& fine_population, const Grid& concentration,
                         const RegionSet& regions) {
  const GridGeometry& fine = fine_population.geometry();
  const GridGeometry& coarse = concentration.geometry();

  // Step 1: population onto the coarse grid, plain += in loop order.
  std::vector<double> coarse_population(coarse.cell_count(), 0.0);
  for (std::uint32_t fr = 0; fr < fine.nrows; ++fr) {
    for (std::uint32_t fc = 0; fc < fine.ncols; ++fc) {
      const std::size_t fi = static_cast<std::size_t>(fr) * fine.ncols + fc;
      const double p = fine_population[fi];
      if (p == fine.nodata || !std::isfinite(p)) continue;
      const double x = fine.xll + (static_cast<double>(fc) + 0.5) * fine.cellsize;
      const double y =
          fine.yll + (static_cast<double>(fine.nrows - fr) - 0.5) * fine.cellsize;
      const double col = std::floor((x - coarse.xll) / coarse.cellsize);
      const double row = std::floor((y - coarse.yll) / coarse.cellsize);
      if (!(col >= 0.0 && col < static_cast<double>(coarse.ncols) && row >= 0.0 &&
            row < static_cast<double>(coarse.nrows))) {
        continue;
      }
      const std::size_t ci =
          static_cast<std::size_t>(coarse.nrows - 1 - static_cast<std::uint32_t>(row)) *
              coarse.ncols +
          static_cast<std::uint32_t>(col);
      coarse_population[ci] += p;
    }
  }

  // Step 2: even-odd ray casting, written out again on purpose.
  const auto inside_ring = [](double px, double py, const Ring& ring) {
    bool inside = false;
    for (std::size_t i = 0, j = ring.size() - 1; i < ring.size(); j = i++) {
      const Point& a = ring[j];
      const Point& b = ring[i];
      if ((a.y > py) != (b.y > py)) {
        const double x_cross = a.x + (b.x - a.x) * ((py - a.y) / (b.y - a.y));
        if (px < x_cross) inside = !inside;
      }
    }
    return inside;
  };
  const auto region_index_of = [&](double px, double py) -> int {
    for (std::size_t r = 0; r < regions.regions.size(); ++r) {
      for (const Polygon& polygon : regions.regions[r].polygons) {
        if (!inside_ring(px, py, polygon.outer)) continue;
        bool in_hole = false;
        for (const Ring& hole : polygon.holes) {
          if (inside_ring(px, py, hole)) {
            in_hole = true;
            break;
          }
        }
        if (!in_hole) return static_cast<int>(r);
      }
    }
    return -1;
  };

  // Step 3: the quotient, naively.
  std::vector<double> numerator(regions.regions.size(), 0.0);
  std::vector<double> denominator(regions.regions.size(), 0.0);
  double all_numerator = 0.0;
  double all_denominator = 0.0;
  for (std::uint32_t cr = 0; cr < coarse.nrows; ++cr) {
    for (std::uint32_t cc = 0; cc < coarse.ncols; ++cc) {
      const std::size_t ci = static_cast<std::size_t>(cr) * coarse.ncols + cc;
      const double x = coarse.xll + (static_cast<double>(cc) + 0.5) * coarse.cellsize;
      const double y =
          coarse.yll + (static_cast<double>(coarse.nrows - cr) - 0.5) * coarse.cellsize;
      const int region = region_index_of(x, y);
      if (region < 0) continue;
      if (!concentration.valid(ci)) continue;
      const double p = coarse_population[ci];
      const double c = concentration[ci];
      numerator[region] += p * c;
      denominator[region] += p;
      all_numerator += p * c;
      all_denominator += p;
    }
  }

  OracleResult result;
  for (std::size_t r = 0; r < regions.regions.size(); ++r) {
    if (denominator[r] != 0.0) {
      result.per_region.push_back(numerator[r] / denominator[r]);
    } else {
      result.per_region.push_back(std::nullopt);
    }
  }
  if (all_denominator != 0.0) {
    result.study_area = all_numerator / all_denominator;
  }
  return result;
}

void bench_generate(const BenchSpec& spec, const std::filesystem::path& dir) {
  if (spec.rows < 1 || spec.cols < 1 || spec.refinement < 1 || spec.years < 1 ||
      spec.n_regions < 1 ||
      static_cast<std::uint64_t>(spec.n_regions) >
          static_cast<std::uint64_t>(spec.rows) * spec.cols) {
    raise(errc::schema_violation, "at /: invalid bench dimensions");
  }

  const std::uint64_t coarse_cells = static_cast<std::uint64_t>(spec.rows) * spec.cols;
  const std::uint64_t fine_cells =
      coarse_cells * spec.refinement * spec.refinement;
  const std::uint64_t estimated_bytes =
      fine_cells * 8 + static_cast<std::uint64_t>(spec.years) * coarse_cells * 8 +
      (1ull << 20);
  if (estimated_bytes > spec.disk_budget_bytes) {
    raise(errc::disk_budget_exceeded,
          "bench instance needs about " + std::to_string(estimated_bytes) +
              " bytes, budget is " + std::to_string(spec.disk_budget_bytes));
  }

  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) {
    raise(errc::output_unwritable,
          "cannot create directory '" + dir.string() + "': " + ec.message());
  }

  GridGeometry coarse;
  coarse.ncols = spec.cols;
  coarse.nrows = spec.rows;
  coarse.xll = 0.0;
  coarse.yll = 0.0;
  coarse.cellsize = 1.0;
  coarse.nodata = kDefaultNodata;

  GridGeometry fine = coarse;
  fine.ncols = spec.cols * spec.refinement;
  fine.nrows = spec.rows * spec.refinement;
  fine.cellsize = coarse.cellsize / static_cast<double>(spec.refinement);

  const RegionSet regions =
      rects_to_regions(partition_rects(spec.rows, spec.cols, spec.n_regions), coarse);
  {
    const std::string text = emit_geojson(regions);
    std::ofstream out(dir / "regions.geojson", std::ios::binary | std::ios::trunc);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    out.flush();
    if (!out) {
      raise(errc::output_unwritable, "write failure on regions.geojson");
    }
  }

  // Fine population, streamed one row at a time.
  {
    BinaryGridRowWriter writer(dir / "population.pwg1", fine);
    std::vector<double> row(fine.ncols);
    for (std::uint32_t fr = 0; fr < fine.nrows; ++fr) {
      const std::uint64_t base = static_cast<std::uint64_t>(fr) * fine.ncols;
      for (std::uint32_t fc = 0; fc < fine.ncols; ++fc) {
        row[fc] = 100.0 * unit_double(spec.seed, kSaltPopulationLevel, base + fc);
      }
      writer.append_rows(row);
    }
    writer.finish();
  }

  // Per-year concentrations around the default trend levels.
  const std::vector<TrendAnchor> trend = default_scenario().trend;
  json population_map = json::object();
  json concentration_map = json::object();
  for (std::uint32_t y = 0; y < spec.years; ++y) {
    const double t = spec.years == 1 ? 1.0 : static_cast<double>(y) / (spec.years - 1);
    const double level = trend_level(trend, t);
    std::vector<double> values(coarse.cell_count());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double u = unit_double(spec.seed, kSaltConcentration + y, i);
      values[i] = std::max(0.0, level + 0.5 * (2.0 * u - 1.0));
    }
    const int year = spec.start_year + static_cast<int>(y);
    const std::string name = "concentration_" + std::to_string(year) + ".pwg1";
    write_grid_file(Grid(coarse, std::move(values)), dir / name);
    population_map[std::to_string(year)] = "population.pwg1";
    concentration_map[std::to_string(year)] = name;
  }

  const json manifest{{"regions", "regions.geojson"},
                      {"population", population_map},
                      {"concentration", concentration_map},
                      {"output_dir", "out"},
                      {"threads", 4}};
  std::ofstream out(dir / "manifest.json", std::ios::binary | std::ios::trunc);
  const std::string text = manifest.dump(2) + "\n";
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.flush();
  if (!out) {
    raise(errc::output_unwritable, "write failure on manifest.json");
  }
}

}  // namespace pwam::synth

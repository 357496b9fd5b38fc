#include "pwam/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "pwam/aggregate.hpp"
#include "pwam/charts.hpp"
#include "pwam/csv.hpp"
#include "pwam/errors.hpp"
#include "pwam/geojson.hpp"
#include "pwam/grid_io.hpp"
#include "pwam/membership.hpp"
#include "pwam/parallel.hpp"
#include "pwam/text.hpp"
#include "pwam/version.hpp"

namespace pwam {

namespace {

// Exact-match key for caching by grid placement.
using GeometryKey = std::tuple<std::uint32_t, std::uint32_t, double, double, double>;

GeometryKey key_of(const GridGeometry& g) {
  return {g.ncols, g.nrows, g.xll, g.yll, g.cellsize};
}

std::string geometry_summary(const GridGeometry& g) {
  std::ostringstream out;
  out << g.ncols << "x" << g.nrows << " cells, cellsize " << format_number(g.cellsize)
      << ", origin (" << format_number(g.xll) << ", " << format_number(g.yll) << ")";
  return out.str();
}

[[noreturn]] void annotate_and_rethrow(const Error& e, int year,
                                       const std::filesystem::path& path) {
  throw Error(e.code(),
              "year " + std::to_string(year) + " (" + path.string() + "): " + e.what());
}

// Population ready for one concentration geometry: either the original grid
// (geometries identical) or the centroid-rule aggregation onto it.
Grid prepare_population(const std::filesystem::path& path, const GridGeometry& coarse,
                        unsigned threads) {
  const GridFileInfo info = probe_grid_file(path);
  if (info.geometry.same_extent(coarse)) {
    return read_grid_file(path);
  }
  if (info.binary) {
    return aggregate_population_file(path, coarse);
  }
  AggregateOptions options;
  options.threads = threads;
  return aggregate_population(read_grid_file(path), coarse, options);
}

Provenance collect_provenance(const RunManifest& manifest) {
  std::set<std::filesystem::path> paths;
  paths.insert(manifest.regions_path);
  for (const auto& entry : manifest.population_paths) paths.insert(entry.second);
  for (const auto& entry : manifest.concentration_paths) paths.insert(entry.second);

  Provenance provenance;
  provenance.engine_version = std::string(kVersion);
  for (const std::filesystem::path& path : paths) {
    provenance.inputs.push_back(
        ProvenanceEntry{path.string(), to_hex(fnv1a64_file(path))});
  }
  return provenance;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    raise(errc::output_unwritable, "cannot open '" + path.string() + "' for writing");
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) {
    raise(errc::output_unwritable, "write failure on '" + path.string() + "'");
  }
}

}  // namespace

const IndicatorRecord* RunResult::study_area(int year) const {
  for (const IndicatorRecord& record : records) {
    if (record.year == year && record.region_id == kStudyAreaId) return &record;
  }
  return nullptr;
}

RunResult compute_run(const RunManifest& manifest) {
  RunResult result;
  result.scheme = IntervalScheme::with_breaks(manifest.breaks);
  result.target = manifest.target;
  for (const auto& entry : manifest.concentration_paths) result.years.push_back(entry.first);

  const RegionSet regions = parse_geojson_file(manifest.regions_path);

  // Probe each year's concentration geometry up front; build one membership
  // per distinct geometry and aggregate each population file once per
  // distinct target geometry.
  std::map<int, GridGeometry> year_geometry;
  std::map<GeometryKey, RegionMembership> memberships;
  std::map<std::pair<std::filesystem::path, GeometryKey>, Grid> populations;

  for (const int year : result.years) {
    const std::filesystem::path& conc_path = manifest.concentration_paths.at(year);
    try {
      year_geometry.emplace(year, probe_grid_file(conc_path).geometry);
    } catch (const Error& e) {
      annotate_and_rethrow(e, year, conc_path);
    }
  }
  {
    std::set<GeometryKey> distinct;
    for (const auto& entry : year_geometry) distinct.insert(key_of(entry.second));
    if (distinct.size() > 1) {
      std::cerr << "warning: concentration geometry differs across years; "
                   "rebuilding region membership per geometry\n";
    }
  }
  MembershipOptions membership_options;
  membership_options.threads = manifest.threads;
  for (const auto& [year, geometry] : year_geometry) {
    const GeometryKey key = key_of(geometry);
    if (!memberships.count(key)) {
      memberships.emplace(key, build_membership(geometry, regions, membership_options));
    }
    const std::filesystem::path& pop_path = manifest.population_paths.at(year);
    const auto pop_key = std::make_pair(pop_path, key);
    if (!populations.count(pop_key)) {
      try {
        populations.emplace(pop_key,
                            prepare_population(pop_path, geometry, manifest.threads));
      } catch (const Error& e) {
        annotate_and_rethrow(e, year, pop_path);
      }
    }
  }

  // Years are independent; compute each into its own slot so the final
  // ordering never depends on scheduling.
  struct YearOutput {
    std::vector<IndicatorRecord> records;
    ExposureDistribution distribution;
    TargetAttainment attainment;
  };
  std::vector<YearOutput> slots(result.years.size());
  parallel::for_each_index(result.years.size(), manifest.threads, [&](std::size_t i) {
    const int year = result.years[i];
    const std::filesystem::path& conc_path = manifest.concentration_paths.at(year);
    Grid concentration;
    try {
      concentration = read_grid_file(conc_path);
    } catch (const Error& e) {
      annotate_and_rethrow(e, year, conc_path);
    }
    const GeometryKey key = key_of(concentration.geometry());
    const RegionMembership& membership = memberships.at(key);
    const Grid& population =
        populations.at(std::make_pair(manifest.population_paths.at(year), key));

    YearOutput& out = slots[i];
    try {
      out.records = compute_all(concentration, population, membership, regions, year);
      out.distribution = exposure_distribution(out.records, result.scheme, year);
      out.attainment = count_below_target(out.records, result.target);
    } catch (const Error& e) {
      annotate_and_rethrow(e, year, conc_path);
    }
  });

  std::vector<IndicatorRecord> study_series;
  for (YearOutput& slot : slots) {
    for (IndicatorRecord& record : slot.records) {
      if (record.region_id == kStudyAreaId) study_series.push_back(record);
      result.records.push_back(std::move(record));
    }
    result.distributions.push_back(std::move(slot.distribution));
    result.attainment.push_back(slot.attainment);
  }
  result.crossing_year = first_crossing_year(study_series, result.target);
  result.provenance = collect_provenance(manifest);
  return result;
}

void emit_outputs(const RunResult& result, const std::filesystem::path& output_dir) {
  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) {
    raise(errc::output_unwritable,
          "cannot create output directory '" + output_dir.string() + "': " + ec.message());
  }
  emit_csv(result, output_dir);
  emit_charts(result, output_dir);

  nlohmann::json inputs = nlohmann::json::array();
  for (const ProvenanceEntry& entry : result.provenance.inputs) {
    inputs.push_back({{"path", entry.path}, {"fnv1a64", entry.digest}});
  }
  const nlohmann::json provenance{{"engine_version", result.provenance.engine_version},
                                  {"inputs", inputs}};
  write_text_file(output_dir / "provenance.json", provenance.dump(2) + "\n");
}

RunResult run(const RunManifest& manifest) {
  RunResult result = compute_run(manifest);
  emit_outputs(result, manifest.output_dir);
  return result;
}

ValidationReport validate_run(const RunManifest& manifest) {
  ValidationReport report;
  for (const auto& entry : manifest.concentration_paths) report.years.push_back(entry.first);

  std::optional<RegionSet> regions;
  {
    FileCheck check{"regions", manifest.regions_path.string(), false, ""};
    try {
      regions = parse_geojson_file(manifest.regions_path);
      report.region_count = regions->regions.size();
      check.ok = true;
      check.detail = std::to_string(report.region_count) + " regions";
    } catch (const Error& e) {
      check.detail = e.what();
      report.errors.push_back("regions (" + check.path + "): " + e.what());
    }
    report.files.push_back(std::move(check));
  }

  std::optional<GridGeometry> reference_geometry;
  std::uint64_t worst_year_bytes = 0;
  for (const int year : report.years) {
    const std::filesystem::path& conc_path = manifest.concentration_paths.at(year);
    std::optional<GridGeometry> conc_geometry;
    {
      FileCheck check{"concentration " + std::to_string(year), conc_path.string(), false, ""};
      try {
        const GridFileInfo info = probe_grid_file(conc_path);
        conc_geometry = info.geometry;
        if (!reference_geometry) reference_geometry = info.geometry;
        check.ok = true;
        check.detail = geometry_summary(info.geometry) +
                       (info.binary ? " [pwg1]" : " [ascii]");
      } catch (const Error& e) {
        check.detail = e.what();
        report.errors.push_back("concentration " + std::to_string(year) + " (" +
                                check.path + "): " + e.what());
      }
      report.files.push_back(std::move(check));
    }

    const std::filesystem::path& pop_path = manifest.population_paths.at(year);
    FileCheck check{"population " + std::to_string(year), pop_path.string(), false, ""};
    try {
      const GridFileInfo info = probe_grid_file(pop_path);
      check.ok = true;
      check.detail =
          geometry_summary(info.geometry) + (info.binary ? " [pwg1]" : " [ascii]");

      // Peak-memory sketch for this year: concentration + aggregated
      // population + membership on the coarse grid, plus either one band of
      // the fine raster (streamed pwg1) or the whole fine raster (ascii).
      if (conc_geometry) {
        const std::uint64_t coarse_cells = conc_geometry->cell_count();
        std::uint64_t bytes = coarse_cells * (8 + 8 + 4);
        if (info.geometry.same_extent(*conc_geometry)) {
          // used directly, already counted
        } else if (info.binary) {
          bytes += 256ull * info.geometry.ncols * 8;
        } else {
          bytes += info.geometry.cell_count() * 8;
        }
        worst_year_bytes = std::max(worst_year_bytes, bytes);
      }
    } catch (const Error& e) {
      check.detail = e.what();
      report.errors.push_back("population " + std::to_string(year) + " (" + check.path +
                              "): " + e.what());
    }
    report.files.push_back(std::move(check));
  }

  if (regions && reference_geometry) {
    for (const Region& region : regions->regions) {
      const BoundingBox& b = region.bounds;
      const bool overlaps = b.xmax >= reference_geometry->xmin() &&
                            b.xmin <= reference_geometry->xmax() &&
                            b.ymax >= reference_geometry->ymin() &&
                            b.ymin <= reference_geometry->ymax();
      if (!overlaps) report.regions_without_coverage.push_back(region.id);
    }
  }

  const std::uint64_t concurrent =
      std::min<std::uint64_t>(std::max(1u, manifest.threads), report.years.size());
  report.estimated_peak_bytes = worst_year_bytes * concurrent;
  report.ok = report.errors.empty();
  return report;
}

std::string format_report(const ValidationReport& report) {
  std::ostringstream out;
  out << "regions: " << report.region_count << "\n";
  out << "years: " << report.years.size();
  if (!report.years.empty()) {
    out << " (" << report.years.front() << ".." << report.years.back() << ")";
  }
  out << "\n";
  for (const FileCheck& check : report.files) {
    out << (check.ok ? "  ok   " : "  FAIL ") << check.role << ": " << check.path << " — "
        << check.detail << "\n";
  }
  if (!report.regions_without_coverage.empty()) {
    out << "no coverage (" << report.regions_without_coverage.size() << "):";
    for (const std::string& id : report.regions_without_coverage) out << " " << id;
    out << "\n";
  }
  out << "estimated peak memory: "
      << format_number(static_cast<double>(report.estimated_peak_bytes) / (1024.0 * 1024.0))
      << " MiB\n";
  out << (report.ok ? "validation passed" : "validation FAILED") << "\n";
  return out.str();
}

}  // namespace pwam

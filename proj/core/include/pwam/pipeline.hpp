#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pwam/indicator.hpp"
#include "pwam/manifest.hpp"

namespace pwam {

struct ProvenanceEntry {
  std::string path;
  std::string digest;  // FNV-1a 64 of the file bytes, hex
};

struct Provenance {
  std::string engine_version;
  std::vector<ProvenanceEntry> inputs;  // sorted by path
};

// Everything one run produces, before any file is written. Records are
// ordered by year ascending, regions in boundary-file order, with the
// study-area record (kStudyAreaId) last within each year.
struct RunResult {
  std::vector<int> years;
  IntervalScheme scheme;
  double target = 35.0;
  std::vector<IndicatorRecord> records;
  std::vector<ExposureDistribution> distributions;  // one per year, ascending
  std::vector<TargetAttainment> attainment;         // one per year, ascending
  std::optional<int> crossing_year;                 // first study-area year < target
  Provenance provenance;

  // The study-area record for one year, or nullptr.
  const IndicatorRecord* study_area(int year) const;
};

// Runs the whole computation without touching the filesystem for output.
RunResult compute_run(const RunManifest& manifest);

// Writes the four CSVs, the two SVGs, and provenance.json into output_dir.
void emit_outputs(const RunResult& result, const std::filesystem::path& output_dir);

// compute_run + emit_outputs(manifest.output_dir).
RunResult run(const RunManifest& manifest);

struct FileCheck {
  std::string role;   // "regions", "population 2000", ...
  std::string path;
  bool ok = false;
  std::string detail;  // geometry summary or the error message
};

struct ValidationReport {
  bool ok = false;
  std::size_t region_count = 0;
  std::vector<int> years;
  std::vector<FileCheck> files;
  std::vector<std::string> regions_without_coverage;  // bbox misses raster extent
  std::uint64_t estimated_peak_bytes = 0;
  std::vector<std::string> errors;  // all problems, collected rather than fail-fast
};

// Dry run: parses every input, collects problems, writes nothing.
ValidationReport validate_run(const RunManifest& manifest);

std::string format_report(const ValidationReport& report);

}  // namespace pwam

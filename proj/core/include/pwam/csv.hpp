#pragma once

#include <filesystem>
#include <string>

#include "pwam/pipeline.hpp"

namespace pwam {

// CSV renderings of a run: UTF-8, comma-separated, header row, LF endings,
// numbers with up to 6 significant digits, "NA" for an undefined pwam.
std::string render_study_area_timeseries(const RunResult& result);
std::string render_city_indicators(const RunResult& result);
std::string render_interval_shares(const RunResult& result);
std::string render_target_attainment(const RunResult& result);

// Writes the four files above into dir (created if needed):
// study_area_timeseries.csv, city_indicators.csv, interval_shares.csv,
// target_attainment.csv. Throws errc::output_unwritable on failure.
void emit_csv(const RunResult& result, const std::filesystem::path& dir);

}  // namespace pwam

#pragma once

#include <filesystem>
#include <string>

#include "pwam/pipeline.hpp"

namespace pwam {

// Standalone SVG 1.1 documents; rendering is deterministic (pure string
// building from the result, fixed 2-decimal coordinates).

// Line chart of the study-area pwam by year, with one dashed horizontal
// reference line (class="reference-line") at the target level.
std::string render_timeseries_svg(const RunResult& result);

// Stacked bar chart of the per-interval population shares by year.
std::string render_shares_svg(const RunResult& result);

// Writes study_area_timeseries.svg and interval_shares.svg into dir.
// Throws errc::output_unwritable on failure.
void emit_charts(const RunResult& result, const std::filesystem::path& dir);

}  // namespace pwam

#pragma once

#include <filesystem>

#include "pwam/grid.hpp"

namespace pwam {

struct AggregateOptions {
  unsigned threads = 1;
};

// Sums each valid fine cell's value into the coarse cell containing the fine
// cell's center. Fine nodata cells contribute nothing; coarse cells that
// receive no fine center hold 0 (not nodata).
//
// Terms are accumulated with compensated summation in fine row-major order,
// blocked into fixed-size row bands whose partials are combined in band
// order. The band structure depends only on the fine geometry, so the result
// is bit-identical for any thread count and matches the streaming variant
// below.
Grid aggregate_population(const Grid& fine, const GridGeometry& coarse_geometry,
                          const AggregateOptions& options = {});

// Same reduction, streamed band-by-band from a PWG1 file so the fine raster
// is never resident in memory.
Grid aggregate_population_file(const std::filesystem::path& fine_path,
                               const GridGeometry& coarse_geometry);

}  // namespace pwam

#include "pwam/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "pwam/grid_io.hpp"
#include "pwam/parallel.hpp"
#include "pwam/summation.hpp"

namespace pwam {

namespace {

// Rows per reduction band. Fixed so the combination structure never depends
// on the thread count.
constexpr std::uint32_t kBandRows = 256;

constexpr std::int64_t kOutside = -1;

// Fine row -> coarse row (or kOutside). Row 0 is north in both grids.
std::vector<std::int64_t> map_rows(const GridGeometry& fine, const GridGeometry& coarse) {
  std::vector<std::int64_t> map(fine.nrows, kOutside);
  for (std::uint32_t r = 0; r < fine.nrows; ++r) {
    const double y =
        fine.yll + (static_cast<double>(fine.nrows - r) - 0.5) * fine.cellsize;
    const double frow = std::floor((y - coarse.yll) / coarse.cellsize);
    if (frow >= 0.0 && frow < static_cast<double>(coarse.nrows)) {
      map[r] = static_cast<std::int64_t>(coarse.nrows - 1 - static_cast<std::uint32_t>(frow));
    }
  }
  return map;
}

// Fine col -> coarse col (or kOutside).
std::vector<std::int64_t> map_cols(const GridGeometry& fine, const GridGeometry& coarse) {
  std::vector<std::int64_t> map(fine.ncols, kOutside);
  for (std::uint32_t c = 0; c < fine.ncols; ++c) {
    const double x = fine.xll + (static_cast<double>(c) + 0.5) * fine.cellsize;
    const double fcol = std::floor((x - coarse.xll) / coarse.cellsize);
    if (fcol >= 0.0 && fcol < static_cast<double>(coarse.ncols)) {
      map[c] = static_cast<std::int64_t>(fcol);
    }
  }
  return map;
}

struct BandPartial {
  std::uint32_t coarse_row_begin = 0;
  std::uint32_t coarse_row_end = 0;  // [begin, end)
  std::vector<CompensatedSum> cells;  // (end - begin) * coarse_ncols

  bool empty() const { return coarse_row_begin == coarse_row_end; }
};

// Accumulates one band of fine rows. `rows` holds band_rows * fine_ncols
// values starting at fine row `fine_row_begin`.
BandPartial process_band(std::span<const double> rows, std::uint32_t fine_row_begin,
                         std::uint32_t band_rows, const std::vector<std::int64_t>& row_map,
                         const std::vector<std::int64_t>& col_map, double fine_nodata,
                         std::uint32_t coarse_ncols) {
  BandPartial partial;
  std::int64_t lo = kOutside, hi = kOutside;
  for (std::uint32_t r = fine_row_begin; r < fine_row_begin + band_rows; ++r) {
    const std::int64_t cr = row_map[r];
    if (cr == kOutside) continue;
    if (lo == kOutside || cr < lo) lo = cr;
    if (hi == kOutside || cr > hi) hi = cr;
  }
  if (lo == kOutside) return partial;

  partial.coarse_row_begin = static_cast<std::uint32_t>(lo);
  partial.coarse_row_end = static_cast<std::uint32_t>(hi) + 1;
  partial.cells.resize(static_cast<std::size_t>(partial.coarse_row_end - partial.coarse_row_begin) *
                       coarse_ncols);

  const std::size_t fine_ncols = col_map.size();
  for (std::uint32_t r = 0; r < band_rows; ++r) {
    const std::int64_t cr = row_map[fine_row_begin + r];
    if (cr == kOutside) continue;
    CompensatedSum* row_cells =
        partial.cells.data() +
        static_cast<std::size_t>(cr - partial.coarse_row_begin) * coarse_ncols;
    const double* row_values = rows.data() + static_cast<std::size_t>(r) * fine_ncols;
    for (std::size_t c = 0; c < fine_ncols; ++c) {
      const double v = row_values[c];
      if (v == fine_nodata || !std::isfinite(v)) continue;
      const std::int64_t cc = col_map[c];
      if (cc == kOutside) continue;
      row_cells[cc].add(v);
    }
  }
  return partial;
}

void merge_band(const BandPartial& partial, std::vector<CompensatedSum>& total,
                std::uint32_t coarse_ncols) {
  if (partial.empty()) return;
  const std::size_t base =
      static_cast<std::size_t>(partial.coarse_row_begin) * coarse_ncols;
  for (std::size_t i = 0; i < partial.cells.size(); ++i) {
    const CompensatedSum& cell = partial.cells[i];
    if (cell.sum == 0.0 && cell.compensation == 0.0) continue;
    total[base + i].merge(cell);
  }
}

Grid finish(const GridGeometry& coarse, const std::vector<CompensatedSum>& total) {
  std::vector<double> values(total.size());
  for (std::size_t i = 0; i < total.size(); ++i) values[i] = total[i].value();
  return Grid(coarse, std::move(values));
}

}  // namespace

Grid aggregate_population(const Grid& fine, const GridGeometry& coarse_geometry,
                          const AggregateOptions& options) {
  coarse_geometry.validate();
  const GridGeometry& fg = fine.geometry();
  const auto row_map = map_rows(fg, coarse_geometry);
  const auto col_map = map_cols(fg, coarse_geometry);

  const std::uint32_t band_count = (fg.nrows + kBandRows - 1) / kBandRows;
  std::vector<BandPartial> partials(band_count);
  parallel::for_each_index(band_count, options.threads, [&](std::size_t b) {
    const std::uint32_t row_begin = static_cast<std::uint32_t>(b) * kBandRows;
    const std::uint32_t band_rows = std::min(kBandRows, fg.nrows - row_begin);
    const std::span<const double> rows =
        fine.values().subspan(static_cast<std::size_t>(row_begin) * fg.ncols,
                              static_cast<std::size_t>(band_rows) * fg.ncols);
    partials[b] = process_band(rows, row_begin, band_rows, row_map, col_map, fg.nodata,
                               coarse_geometry.ncols);
  });

  std::vector<CompensatedSum> total(coarse_geometry.cell_count());
  for (const BandPartial& partial : partials) {
    merge_band(partial, total, coarse_geometry.ncols);
  }
  return finish(coarse_geometry, total);
}

Grid aggregate_population_file(const std::filesystem::path& fine_path,
                               const GridGeometry& coarse_geometry) {
  coarse_geometry.validate();
  BinaryGridRowReader reader(fine_path);
  const GridGeometry fg = reader.geometry();
  const auto row_map = map_rows(fg, coarse_geometry);
  const auto col_map = map_cols(fg, coarse_geometry);

  std::vector<double> buffer(static_cast<std::size_t>(kBandRows) * fg.ncols);
  std::vector<CompensatedSum> total(coarse_geometry.cell_count());
  for (std::uint32_t row_begin = 0; row_begin < fg.nrows; row_begin += kBandRows) {
    const std::uint32_t band_rows = std::min(kBandRows, fg.nrows - row_begin);
    const std::span<double> rows(buffer.data(),
                                 static_cast<std::size_t>(band_rows) * fg.ncols);
    reader.read_rows(row_begin, band_rows, rows);
    const BandPartial partial = process_band(rows, row_begin, band_rows, row_map, col_map,
                                             fg.nodata, coarse_geometry.ncols);
    merge_band(partial, total, coarse_geometry.ncols);
  }
  return finish(coarse_geometry, total);
}

}  // namespace pwam

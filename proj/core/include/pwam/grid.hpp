#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "pwam/errors.hpp"

namespace pwam {

inline constexpr double kDefaultNodata = -9999.0;

// Placement of a row-major raster in map coordinates. Cells are square.
// Row 0 is the northernmost row; cell (row r, col c) covers the half-open box
//   [xll + c*cellsize, xll + (c+1)*cellsize) x
//   [yll + (nrows-1-r)*cellsize, yll + (nrows-r)*cellsize).
struct GridGeometry {
  std::uint32_t ncols = 0;
  std::uint32_t nrows = 0;
  double xll = 0.0;  // x of the lower-left corner, map units
  double yll = 0.0;  // y of the lower-left corner, map units
  double cellsize = 1.0;
  double nodata = kDefaultNodata;

  std::size_t cell_count() const noexcept {
    return static_cast<std::size_t>(ncols) * static_cast<std::size_t>(nrows);
  }

  double xmin() const noexcept { return xll; }
  double ymin() const noexcept { return yll; }
  double xmax() const noexcept { return xll + static_cast<double>(ncols) * cellsize; }
  double ymax() const noexcept { return yll + static_cast<double>(nrows) * cellsize; }

  // Two geometries describe the same grid when everything except the nodata
  // sentinel matches exactly.
  bool same_extent(const GridGeometry& other) const noexcept {
    return ncols == other.ncols && nrows == other.nrows && xll == other.xll &&
           yll == other.yll && cellsize == other.cellsize;
  }

  // Throws GeometryDegenerate on non-positive dimensions or a broken cellsize.
  void validate() const;
};

struct CellIndex {
  std::uint32_t row = 0;
  std::uint32_t col = 0;

  bool operator==(const CellIndex&) const = default;
};

class Grid {
 public:
  Grid() = default;

  // Throws ValueCountMismatch unless values.size() == geometry.cell_count().
  Grid(GridGeometry geometry, std::vector<double> values);

  static Grid filled(GridGeometry geometry, double value);

  const GridGeometry& geometry() const noexcept { return geometry_; }
  std::span<const double> values() const noexcept { return values_; }
  std::size_t cell_count() const noexcept { return values_.size(); }

  double operator[](std::size_t index) const noexcept { return values_[index]; }
  double at(std::uint32_t row, std::uint32_t col) const;
  void set(std::uint32_t row, std::uint32_t col, double value);

  std::size_t index_of(std::uint32_t row, std::uint32_t col) const noexcept {
    return static_cast<std::size_t>(row) * geometry_.ncols + col;
  }

  // A cell holds a measurement only when its value is finite and is not the
  // nodata sentinel.
  bool valid(std::size_t index) const noexcept {
    const double v = values_[index];
    return v != geometry_.nodata && std::isfinite(v);
  }

 private:
  GridGeometry geometry_;
  std::vector<double> values_;
};

// Map coordinates of the center of cell (row, col).
// Throws IndexOutOfRange when the cell does not exist.
std::pair<double, double> cell_center(const GridGeometry& geometry, std::uint32_t row,
                                      std::uint32_t col);

// The unique cell whose half-open box contains (x, y), or nullopt when the
// point lies outside the grid extent. Points on a shared edge belong to the
// cell on the closed (lower-x / lower-y) side:
//   col = floor((x - xll) / cellsize), row = nrows - 1 - floor((y - yll) / cellsize).
std::optional<CellIndex> locate_cell(const GridGeometry& geometry, double x, double y);

}  // namespace pwam

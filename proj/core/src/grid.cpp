#include "pwam/grid.hpp"

#include <string>

namespace pwam {

void GridGeometry::validate() const {
  if (ncols < 1 || nrows < 1) {
    raise(errc::geometry_degenerate,
          "grid must have at least one row and one column (got " + std::to_string(ncols) +
              "x" + std::to_string(nrows) + ")");
  }
  if (!(cellsize > 0.0) || !std::isfinite(cellsize)) {
    raise(errc::geometry_degenerate, "cellsize must be a positive finite number");
  }
  if (!std::isfinite(xll) || !std::isfinite(yll)) {
    raise(errc::geometry_degenerate, "grid origin must be finite");
  }
}

Grid::Grid(GridGeometry geometry, std::vector<double> values)
    : geometry_(geometry), values_(std::move(values)) {
  geometry_.validate();
  if (values_.size() != geometry_.cell_count()) {
    raise(errc::value_count_mismatch,
          "expected " + std::to_string(geometry_.cell_count()) + " values, got " +
              std::to_string(values_.size()));
  }
}

Grid Grid::filled(GridGeometry geometry, double value) {
  geometry.validate();
  return Grid(geometry, std::vector<double>(geometry.cell_count(), value));
}

double Grid::at(std::uint32_t row, std::uint32_t col) const {
  if (row >= geometry_.nrows || col >= geometry_.ncols) {
    raise(errc::index_out_of_range,
          "cell (" + std::to_string(row) + ", " + std::to_string(col) + ") outside " +
              std::to_string(geometry_.nrows) + "x" + std::to_string(geometry_.ncols));
  }
  return values_[index_of(row, col)];
}

void Grid::set(std::uint32_t row, std::uint32_t col, double value) {
  if (row >= geometry_.nrows || col >= geometry_.ncols) {
    raise(errc::index_out_of_range,
          "cell (" + std::to_string(row) + ", " + std::to_string(col) + ") outside " +
              std::to_string(geometry_.nrows) + "x" + std::to_string(geometry_.ncols));
  }
  values_[index_of(row, col)] = value;
}

std::pair<double, double> cell_center(const GridGeometry& geometry, std::uint32_t row,
                                      std::uint32_t col) {
  if (row >= geometry.nrows || col >= geometry.ncols) {
    raise(errc::index_out_of_range,
          "cell (" + std::to_string(row) + ", " + std::to_string(col) + ") outside " +
              std::to_string(geometry.nrows) + "x" + std::to_string(geometry.ncols));
  }
  const double x = geometry.xll + (static_cast<double>(col) + 0.5) * geometry.cellsize;
  const double y =
      geometry.yll + (static_cast<double>(geometry.nrows - row) - 0.5) * geometry.cellsize;
  return {x, y};
}

std::optional<CellIndex> locate_cell(const GridGeometry& geometry, double x, double y) {
  const double fcol = std::floor((x - geometry.xll) / geometry.cellsize);
  const double frow = std::floor((y - geometry.yll) / geometry.cellsize);
  // Written so that NaN coordinates fall through to "outside".
  if (!(fcol >= 0.0 && fcol < static_cast<double>(geometry.ncols) && frow >= 0.0 &&
        frow < static_cast<double>(geometry.nrows))) {
    return std::nullopt;
  }
  return CellIndex{geometry.nrows - 1 - static_cast<std::uint32_t>(frow),
                   static_cast<std::uint32_t>(fcol)};
}

}  // namespace pwam

#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <string>

#include "pwam/grid.hpp"

namespace pwam {

// ESRI ASCII grid: six header lines (NCOLS, NROWS, XLLCORNER or XLLCENTER,
// YLLCORNER or YLLCENTER, CELLSIZE, NODATA_VALUE), keywords case-insensitive,
// NODATA_VALUE optional (default -9999), followed by nrows lines of ncols
// whitespace-separated numbers, northernmost row first. Values are emitted in
// shortest round-trip form, so read(write(grid)) reproduces the grid exactly.
Grid read_ascii_grid(std::istream& in);
Grid read_ascii_grid(const std::string& text);
void write_ascii_grid(const Grid& grid, std::ostream& out);
std::string write_ascii_grid(const Grid& grid);

// PWG1 binary grid, little-endian:
//   "PWG1" magic, u32 version (=1), u32 ncols, u32 nrows,
//   f64 xll, f64 yll, f64 cellsize, f64 nodata,
//   then ncols*nrows f64 values row-major.
Grid read_binary_grid(std::istream& in);
void write_binary_grid(const Grid& grid, std::ostream& out);

inline constexpr char kBinaryMagic[4] = {'P', 'W', 'G', '1'};
inline constexpr std::uint32_t kBinaryVersion = 1;
inline constexpr std::size_t kBinaryHeaderSize = 48;

// File-level helpers. Reading sniffs the PWG1 magic and otherwise parses as
// ASCII; writing picks the binary layout for a ".pwg1" extension.
Grid read_grid_file(const std::filesystem::path& path);
void write_grid_file(const Grid& grid, const std::filesystem::path& path);
bool is_binary_grid_file(const std::filesystem::path& path);

// Header plus value-count validation without materializing the payload.
// For ASCII this still scans every token; for PWG1 it checks the file size.
struct GridFileInfo {
  GridGeometry geometry;
  bool binary = false;
};
GridFileInfo probe_grid_file(const std::filesystem::path& path);

// Sequential/random row access to a PWG1 file, used to aggregate rasters that
// are too large to hold in memory.
class BinaryGridRowReader {
 public:
  explicit BinaryGridRowReader(const std::filesystem::path& path);

  const GridGeometry& geometry() const noexcept { return geometry_; }

  // Reads rows [first_row, first_row + row_count) into out, which must hold
  // row_count * ncols doubles.
  void read_rows(std::uint32_t first_row, std::uint32_t row_count, std::span<double> out);

 private:
  std::ifstream stream_;
  std::filesystem::path path_;
  GridGeometry geometry_;
};

// Streaming PWG1 writer; rows must be appended north to south.
class BinaryGridRowWriter {
 public:
  BinaryGridRowWriter(const std::filesystem::path& path, const GridGeometry& geometry);
  ~BinaryGridRowWriter();

  BinaryGridRowWriter(const BinaryGridRowWriter&) = delete;
  BinaryGridRowWriter& operator=(const BinaryGridRowWriter&) = delete;

  void append_rows(std::span<const double> values);

  // Flushes and verifies that exactly nrows rows were written.
  void finish();

 private:
  std::ofstream stream_;
  std::filesystem::path path_;
  GridGeometry geometry_;
  std::uint64_t values_written_ = 0;
  bool finished_ = false;
};

}  // namespace pwam

#include "pwam/grid_io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <limits>
#include <sstream>
#include <system_error>

namespace pwam {

namespace {

constexpr std::uint64_t bswap64(std::uint64_t v) noexcept {
  return ((v & 0x00000000000000ffULL) << 56) | ((v & 0x000000000000ff00ULL) << 40) |
         ((v & 0x0000000000ff0000ULL) << 24) | ((v & 0x00000000ff000000ULL) << 8) |
         ((v & 0x000000ff00000000ULL) >> 8) | ((v & 0x0000ff0000000000ULL) >> 24) |
         ((v & 0x00ff000000000000ULL) >> 40) | ((v & 0xff00000000000000ULL) >> 56);
}

constexpr std::uint32_t bswap32(std::uint32_t v) noexcept {
  return ((v & 0x000000ffU) << 24) | ((v & 0x0000ff00U) << 8) | ((v & 0x00ff0000U) >> 8) |
         ((v & 0xff000000U) >> 24);
}

constexpr bool kBigEndianHost = std::endian::native == std::endian::big;

void encode_u32(std::uint32_t v, char* out) {
  if constexpr (kBigEndianHost) v = bswap32(v);
  std::memcpy(out, &v, 4);
}

void encode_f64(double d, char* out) {
  auto v = std::bit_cast<std::uint64_t>(d);
  if constexpr (kBigEndianHost) v = bswap64(v);
  std::memcpy(out, &v, 8);
}

std::uint32_t decode_u32(const char* in) {
  std::uint32_t v;
  std::memcpy(&v, in, 4);
  if constexpr (kBigEndianHost) v = bswap32(v);
  return v;
}

double decode_f64(const char* in) {
  std::uint64_t v;
  std::memcpy(&v, in, 8);
  if constexpr (kBigEndianHost) v = bswap64(v);
  return std::bit_cast<double>(v);
}

bool parse_double_token(std::string_view token, double& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto result = std::from_chars(first, last, out);
  return result.ec == std::errc{} && result.ptr == last;
}

bool parse_u32_token(std::string_view token, std::uint32_t& out) {
  if (!token.empty() && token.front() == '+') token.remove_prefix(1);
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto result = std::from_chars(first, last, out);
  return result.ec == std::errc{} && result.ptr == last;
}

// Shortest representation that parses back to the same double.
std::string format_double(double value) {
  char buf[32];
  const auto result = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, result.ptr);
}

// Whitespace-delimited token with any stray carriage returns removed.
bool next_token(std::istream& in, std::string& token) {
  if (!(in >> token)) return false;
  token.erase(std::remove(token.begin(), token.end(), '\r'), token.end());
  if (token.empty()) return next_token(in, token);
  return true;
}

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

struct AsciiHeader {
  GridGeometry geometry;
  bool have_ncols = false, have_nrows = false, have_x = false, have_y = false,
       have_cellsize = false, have_nodata = false;
  bool x_is_center = false, y_is_center = false;

  bool complete() const { return have_ncols && have_nrows && have_x && have_y && have_cellsize; }
};

// Consumes header lines; returns the first data token (if one was read) in
// `pending`.
AsciiHeader read_ascii_header(std::istream& in, std::string& pending, bool& has_pending) {
  AsciiHeader h;
  h.geometry.nodata = kDefaultNodata;
  std::string token;
  has_pending = false;
  while (next_token(in, token)) {
    if (token.empty() || !std::isalpha(static_cast<unsigned char>(token.front()))) {
      pending = token;
      has_pending = true;
      break;
    }
    const std::string keyword = lowercase(token);
    std::string value_token;
    if (!next_token(in, value_token)) {
      raise(errc::malformed_header, "header keyword '" + token + "' has no value");
    }
    auto need_double = [&](const char* name) {
      double v;
      if (!parse_double_token(value_token, v)) {
        raise(errc::malformed_header,
              std::string(name) + " value '" + value_token + "' is not a number");
      }
      return v;
    };
    auto need_u32 = [&](const char* name) {
      std::uint32_t v;
      if (!parse_u32_token(value_token, v)) {
        raise(errc::malformed_header,
              std::string(name) + " value '" + value_token + "' is not a positive integer");
      }
      return v;
    };
    if (keyword == "ncols") {
      if (h.have_ncols) raise(errc::malformed_header, "duplicate NCOLS");
      h.geometry.ncols = need_u32("NCOLS");
      h.have_ncols = true;
    } else if (keyword == "nrows") {
      if (h.have_nrows) raise(errc::malformed_header, "duplicate NROWS");
      h.geometry.nrows = need_u32("NROWS");
      h.have_nrows = true;
    } else if (keyword == "xllcorner" || keyword == "xllcenter") {
      if (h.have_x) raise(errc::malformed_header, "duplicate XLLCORNER/XLLCENTER");
      h.geometry.xll = need_double("XLLCORNER");
      h.x_is_center = (keyword == "xllcenter");
      h.have_x = true;
    } else if (keyword == "yllcorner" || keyword == "yllcenter") {
      if (h.have_y) raise(errc::malformed_header, "duplicate YLLCORNER/YLLCENTER");
      h.geometry.yll = need_double("YLLCORNER");
      h.y_is_center = (keyword == "yllcenter");
      h.have_y = true;
    } else if (keyword == "cellsize") {
      if (h.have_cellsize) raise(errc::malformed_header, "duplicate CELLSIZE");
      h.geometry.cellsize = need_double("CELLSIZE");
      h.have_cellsize = true;
    } else if (keyword == "nodata_value") {
      if (h.have_nodata) raise(errc::malformed_header, "duplicate NODATA_VALUE");
      h.geometry.nodata = need_double("NODATA_VALUE");
      h.have_nodata = true;
    } else {
      raise(errc::malformed_header, "unknown header keyword '" + token + "'");
    }
  }
  if (!h.complete()) {
    raise(errc::malformed_header,
          "header is missing one of NCOLS, NROWS, XLLCORNER, YLLCORNER, CELLSIZE");
  }
  // Center-referenced origins are converted to the corner convention.
  if (h.x_is_center) h.geometry.xll -= h.geometry.cellsize / 2.0;
  if (h.y_is_center) h.geometry.yll -= h.geometry.cellsize / 2.0;
  h.geometry.validate();
  return h;
}

[[noreturn]] void raise_count_mismatch(std::size_t expected, std::size_t got, bool more) {
  raise(errc::value_count_mismatch, "expected " + std::to_string(expected) + " values, got " +
                                        (more ? "more than " : "") + std::to_string(got));
}

void read_header_block(std::istream& in, char (&header)[kBinaryHeaderSize]) {
  in.read(header, kBinaryHeaderSize);
  const auto got = static_cast<std::size_t>(in.gcount());
  if (got >= 4 && std::memcmp(header, kBinaryMagic, 4) != 0) {
    raise(errc::bad_magic, "not a PWG1 grid");
  }
  if (got < kBinaryHeaderSize) {
    raise(errc::truncated_payload,
          "header truncated: " + std::to_string(got) + " of " +
              std::to_string(kBinaryHeaderSize) + " bytes");
  }
}

void encode_binary_header(const GridGeometry& g, char (&header)[kBinaryHeaderSize]) {
  std::memcpy(header, kBinaryMagic, 4);
  encode_u32(kBinaryVersion, header + 4);
  encode_u32(g.ncols, header + 8);
  encode_u32(g.nrows, header + 12);
  encode_f64(g.xll, header + 16);
  encode_f64(g.yll, header + 24);
  encode_f64(g.cellsize, header + 32);
  encode_f64(g.nodata, header + 40);
}

GridGeometry parse_binary_header(const char (&header)[kBinaryHeaderSize]) {
  const std::uint32_t version = decode_u32(header + 4);
  if (version != kBinaryVersion) {
    raise(errc::unsupported_version, "PWG1 version " + std::to_string(version));
  }
  GridGeometry geometry;
  geometry.ncols = decode_u32(header + 8);
  geometry.nrows = decode_u32(header + 12);
  geometry.xll = decode_f64(header + 16);
  geometry.yll = decode_f64(header + 24);
  geometry.cellsize = decode_f64(header + 32);
  geometry.nodata = decode_f64(header + 40);
  geometry.validate();
  return geometry;
}

void decode_values_in_place(std::span<double> values) {
  if constexpr (kBigEndianHost) {
    for (double& v : values) {
      v = std::bit_cast<double>(bswap64(std::bit_cast<std::uint64_t>(v)));
    }
  }
}

}  // namespace

Grid read_ascii_grid(std::istream& in) {
  std::string pending;
  bool has_pending = false;
  const AsciiHeader header = read_ascii_header(in, pending, has_pending);
  const std::size_t expected = header.geometry.cell_count();

  std::vector<double> values;
  values.reserve(expected);
  std::string token;
  auto consume = [&](const std::string& t) {
    double v;
    if (!parse_double_token(t, v)) {
      raise(errc::non_numeric_token, "'" + t + "' at value position " +
                                         std::to_string(values.size()));
    }
    if (values.size() == expected) raise_count_mismatch(expected, expected, true);
    values.push_back(v);
  };
  if (has_pending) consume(pending);
  while (next_token(in, token)) consume(token);
  if (values.size() != expected) raise_count_mismatch(expected, values.size(), false);
  return Grid(header.geometry, std::move(values));
}

Grid read_ascii_grid(const std::string& text) {
  std::istringstream in(text);
  return read_ascii_grid(in);
}

void write_ascii_grid(const Grid& grid, std::ostream& out) {
  const GridGeometry& g = grid.geometry();
  out << "NCOLS " << g.ncols << '\n';
  out << "NROWS " << g.nrows << '\n';
  out << "XLLCORNER " << format_double(g.xll) << '\n';
  out << "YLLCORNER " << format_double(g.yll) << '\n';
  out << "CELLSIZE " << format_double(g.cellsize) << '\n';
  out << "NODATA_VALUE " << format_double(g.nodata) << '\n';
  const auto values = grid.values();
  std::string line;
  for (std::uint32_t row = 0; row < g.nrows; ++row) {
    line.clear();
    const std::size_t base = static_cast<std::size_t>(row) * g.ncols;
    for (std::uint32_t col = 0; col < g.ncols; ++col) {
      if (col != 0) line += ' ';
      line += format_double(values[base + col]);
    }
    line += '\n';
    out << line;
  }
}

std::string write_ascii_grid(const Grid& grid) {
  std::ostringstream out;
  write_ascii_grid(grid, out);
  return out.str();
}

Grid read_binary_grid(std::istream& in) {
  char header[kBinaryHeaderSize];
  read_header_block(in, header);
  const GridGeometry geometry = parse_binary_header(header);
  const std::size_t count = geometry.cell_count();
  std::vector<double> values(count);
  in.read(reinterpret_cast<char*>(values.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  const auto got = static_cast<std::size_t>(in.gcount());
  if (got != count * sizeof(double)) {
    raise(errc::truncated_payload, "payload holds " + std::to_string(got / sizeof(double)) +
                                       " of " + std::to_string(count) + " values");
  }
  decode_values_in_place(values);
  return Grid(geometry, std::move(values));
}

void write_binary_grid(const Grid& grid, std::ostream& out) {
  char header[kBinaryHeaderSize];
  encode_binary_header(grid.geometry(), header);
  out.write(header, kBinaryHeaderSize);
  if constexpr (kBigEndianHost) {
    char buf[8];
    for (const double v : grid.values()) {
      encode_f64(v, buf);
      out.write(buf, 8);
    }
  } else {
    const auto values = grid.values();
    out.write(reinterpret_cast<const char*>(values.data()),
              static_cast<std::streamsize>(values.size() * sizeof(double)));
  }
}

bool is_binary_grid_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::io_failure, "cannot open '" + path.string() + "'");
  char magic[4] = {};
  in.read(magic, 4);
  return in.gcount() == 4 && std::memcmp(magic, kBinaryMagic, 4) == 0;
}

Grid read_grid_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::io_failure, "cannot open '" + path.string() + "'");
  char magic[4] = {};
  in.read(magic, 4);
  const bool binary = in.gcount() == 4 && std::memcmp(magic, kBinaryMagic, 4) == 0;
  in.clear();
  in.seekg(0);
  return binary ? read_binary_grid(in) : read_ascii_grid(in);
}

void write_grid_file(const Grid& grid, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) raise(errc::output_unwritable, "cannot open '" + path.string() + "' for writing");
  if (path.extension() == ".pwg1") {
    write_binary_grid(grid, out);
  } else {
    write_ascii_grid(grid, out);
  }
  out.flush();
  if (!out) raise(errc::output_unwritable, "failed writing '" + path.string() + "'");
}

GridFileInfo probe_grid_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(errc::io_failure, "cannot open '" + path.string() + "'");
  char magic[4] = {};
  in.read(magic, 4);
  const bool binary = in.gcount() == 4 && std::memcmp(magic, kBinaryMagic, 4) == 0;
  in.clear();
  in.seekg(0);

  GridFileInfo info;
  info.binary = binary;
  if (binary) {
    char header[kBinaryHeaderSize];
    read_header_block(in, header);
    info.geometry = parse_binary_header(header);
    const auto size = std::filesystem::file_size(path);
    const std::uint64_t needed =
        kBinaryHeaderSize + static_cast<std::uint64_t>(info.geometry.cell_count()) * 8;
    if (size < needed) {
      raise(errc::truncated_payload, "'" + path.string() + "' holds " + std::to_string(size) +
                                         " of " + std::to_string(needed) + " bytes");
    }
    return info;
  }

  std::string pending;
  bool has_pending = false;
  const AsciiHeader header = read_ascii_header(in, pending, has_pending);
  info.geometry = header.geometry;
  const std::size_t expected = header.geometry.cell_count();
  std::size_t count = 0;
  std::string token = pending;
  bool have = has_pending;
  while (have) {
    double v;
    if (!parse_double_token(token, v)) {
      raise(errc::non_numeric_token,
            "'" + token + "' at value position " + std::to_string(count));
    }
    if (++count > expected) raise_count_mismatch(expected, expected, true);
    have = next_token(in, token);
  }
  if (count != expected) raise_count_mismatch(expected, count, false);
  return info;
}

BinaryGridRowReader::BinaryGridRowReader(const std::filesystem::path& path)
    : stream_(path, std::ios::binary), path_(path) {
  if (!stream_) raise(errc::io_failure, "cannot open '" + path.string() + "'");
  char header[kBinaryHeaderSize];
  read_header_block(stream_, header);
  geometry_ = parse_binary_header(header);
}

void BinaryGridRowReader::read_rows(std::uint32_t first_row, std::uint32_t row_count,
                                    std::span<double> out) {
  if (first_row >= geometry_.nrows || row_count > geometry_.nrows - first_row) {
    raise(errc::index_out_of_range, "row range [" + std::to_string(first_row) + ", " +
                                        std::to_string(first_row + row_count) + ") outside " +
                                        std::to_string(geometry_.nrows) + " rows");
  }
  const std::size_t count = static_cast<std::size_t>(row_count) * geometry_.ncols;
  if (out.size() < count) {
    raise(errc::index_out_of_range, "row buffer too small");
  }
  const std::uint64_t offset =
      kBinaryHeaderSize +
      static_cast<std::uint64_t>(first_row) * geometry_.ncols * sizeof(double);
  stream_.seekg(static_cast<std::streamoff>(offset));
  stream_.read(reinterpret_cast<char*>(out.data()),
               static_cast<std::streamsize>(count * sizeof(double)));
  if (static_cast<std::size_t>(stream_.gcount()) != count * sizeof(double)) {
    raise(errc::truncated_payload, "'" + path_.string() + "' ends inside row payload");
  }
  decode_values_in_place(out.subspan(0, count));
}

BinaryGridRowWriter::BinaryGridRowWriter(const std::filesystem::path& path,
                                         const GridGeometry& geometry)
    : stream_(path, std::ios::binary), path_(path), geometry_(geometry) {
  geometry_.validate();
  if (!stream_) {
    raise(errc::output_unwritable, "cannot open '" + path.string() + "' for writing");
  }
  char header[kBinaryHeaderSize];
  encode_binary_header(geometry_, header);
  stream_.write(header, kBinaryHeaderSize);
}

BinaryGridRowWriter::~BinaryGridRowWriter() = default;

void BinaryGridRowWriter::append_rows(std::span<const double> values) {
  if (values.size() % geometry_.ncols != 0) {
    raise(errc::value_count_mismatch, "append_rows requires whole rows");
  }
  if constexpr (kBigEndianHost) {
    char buf[8];
    for (const double v : values) {
      encode_f64(v, buf);
      stream_.write(buf, 8);
    }
  } else {
    stream_.write(reinterpret_cast<const char*>(values.data()),
                  static_cast<std::streamsize>(values.size() * sizeof(double)));
  }
  values_written_ += values.size();
}

void BinaryGridRowWriter::finish() {
  if (finished_) return;
  finished_ = true;
  if (values_written_ != geometry_.cell_count()) {
    raise(errc::value_count_mismatch, "wrote " + std::to_string(values_written_) +
                                          " of " + std::to_string(geometry_.cell_count()) +
                                          " values to '" + path_.string() + "'");
  }
  stream_.flush();
  if (!stream_) raise(errc::output_unwritable, "failed writing '" + path_.string() + "'");
}

}  // namespace pwam

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace pwam {

// Renders with up to 6 significant digits (printf %.6g); -0 collapses to 0.
std::string format_number(double v);

// Fixed-point rendering with the given number of decimals (printf %.*f).
std::string format_fixed(double v, int precision);

// Escapes &, <, >, " and ' for use in XML text and attribute values.
std::string xml_escape(std::string_view text);

// RFC 4180 field quoting: wraps in quotes (doubling embedded quotes) only
// when the field contains a comma, quote, or line break.
std::string csv_field(std::string_view field);

// FNV-1a 64-bit digests, used for provenance stamping.
std::uint64_t fnv1a64(std::string_view data);
std::uint64_t fnv1a64_file(const std::filesystem::path& path);
std::string to_hex(std::uint64_t value);

}  // namespace pwam

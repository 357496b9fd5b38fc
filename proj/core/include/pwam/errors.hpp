#pragma once

#include <stdexcept>
#include <string>

namespace pwam {

// Every failure the library reports carries one of these codes so callers
// (and tests) can react to the class of failure rather than parse messages.
enum class errc {
  // grid file I/O
  malformed_header,
  value_count_mismatch,
  non_numeric_token,
  bad_magic,
  unsupported_version,
  truncated_payload,
  io_failure,

  // geometry and indexing
  index_out_of_range,
  geometry_degenerate,
  geometry_mismatch,

  // GeoJSON parsing
  not_feature_collection,
  missing_id,
  duplicate_id,
  unsupported_geometry_type,
  degenerate_ring,

  // indicator math
  undefined_input,
  negative_input,
  duplicate_year,

  // manifest / pipeline
  schema_violation,
  missing_year_mapping,
  non_ascending_breaks,
  output_unwritable,
  disk_budget_exceeded,
};

const char* to_string(errc code) noexcept;

// Process exit categories: 1 = input error, 2 = computation error,
// 3 = output error.
int exit_category(errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  errc code() const noexcept { return code_; }
  int exit_category() const noexcept { return pwam::exit_category(code_); }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace pwam

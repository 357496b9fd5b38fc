#include "pwam/errors.hpp"

namespace pwam {

const char* to_string(errc code) noexcept {
  switch (code) {
    case errc::malformed_header: return "MalformedHeader";
    case errc::value_count_mismatch: return "ValueCountMismatch";
    case errc::non_numeric_token: return "NonNumericToken";
    case errc::bad_magic: return "BadMagic";
    case errc::unsupported_version: return "UnsupportedVersion";
    case errc::truncated_payload: return "TruncatedPayload";
    case errc::io_failure: return "IoFailure";
    case errc::index_out_of_range: return "IndexOutOfRange";
    case errc::geometry_degenerate: return "GeometryDegenerate";
    case errc::geometry_mismatch: return "GeometryMismatch";
    case errc::not_feature_collection: return "NotFeatureCollection";
    case errc::missing_id: return "MissingId";
    case errc::duplicate_id: return "DuplicateId";
    case errc::unsupported_geometry_type: return "UnsupportedGeometryType";
    case errc::degenerate_ring: return "DegenerateRing";
    case errc::undefined_input: return "UndefinedInput";
    case errc::negative_input: return "NegativeInput";
    case errc::duplicate_year: return "DuplicateYear";
    case errc::schema_violation: return "SchemaViolation";
    case errc::missing_year_mapping: return "MissingYearMapping";
    case errc::non_ascending_breaks: return "NonAscendingBreaks";
    case errc::output_unwritable: return "OutputUnwritable";
    case errc::disk_budget_exceeded: return "DiskBudgetExceeded";
  }
  return "UnknownError";
}

int exit_category(errc code) noexcept {
  switch (code) {
    case errc::malformed_header:
    case errc::value_count_mismatch:
    case errc::non_numeric_token:
    case errc::bad_magic:
    case errc::unsupported_version:
    case errc::truncated_payload:
    case errc::io_failure:
    case errc::geometry_degenerate:
    case errc::not_feature_collection:
    case errc::missing_id:
    case errc::duplicate_id:
    case errc::unsupported_geometry_type:
    case errc::degenerate_ring:
    case errc::undefined_input:
    case errc::negative_input:
    case errc::schema_violation:
    case errc::missing_year_mapping:
    case errc::non_ascending_breaks:
      return 1;
    case errc::index_out_of_range:
    case errc::geometry_mismatch:
    case errc::duplicate_year:
      return 2;
    case errc::output_unwritable:
    case errc::disk_budget_exceeded:
      return 3;
  }
  return 2;
}

}  // namespace pwam

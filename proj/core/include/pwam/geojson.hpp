#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "pwam/geometry.hpp"

namespace pwam {

// Parses a GeoJSON FeatureCollection of Polygon/MultiPolygon features.
// Each feature needs string property `id` (unique); `name` defaults to the
// id when absent. Feature order is preserved (it defines precedence).
RegionSet parse_geojson(std::string_view text);
RegionSet parse_geojson_file(const std::filesystem::path& path);

// Serializes a RegionSet back to a FeatureCollection (rings re-closed).
std::string emit_geojson(const RegionSet& regions);

}  // namespace pwam

#include "pwam/geojson.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>

#include "pwam/errors.hpp"

namespace pwam {

namespace {

using nlohmann::json;

Ring parse_ring(const json& coords, const std::string& feature_id) {
  if (!coords.is_array()) {
    raise(errc::degenerate_ring, "feature '" + feature_id + "': ring is not an array");
  }
  Ring ring;
  ring.reserve(coords.size());
  for (const json& position : coords) {
    if (!position.is_array() || position.size() < 2 || !position[0].is_number() ||
        !position[1].is_number()) {
      raise(errc::degenerate_ring,
            "feature '" + feature_id + "': position is not an [x, y] pair");
    }
    ring.push_back(Point{position[0].get<double>(), position[1].get<double>()});
  }
  return normalize_ring(std::move(ring));
}

Polygon parse_polygon_rings(const json& rings, const std::string& feature_id) {
  if (!rings.is_array() || rings.empty()) {
    raise(errc::degenerate_ring, "feature '" + feature_id + "': polygon has no rings");
  }
  Polygon polygon;
  polygon.outer = parse_ring(rings[0], feature_id);
  for (std::size_t i = 1; i < rings.size(); ++i) {
    polygon.holes.push_back(parse_ring(rings[i], feature_id));
  }
  return polygon;
}

}  // namespace

RegionSet parse_geojson(std::string_view text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    raise(errc::not_feature_collection, "input is not a JSON object");
  }
  if (doc.value("type", std::string()) != "FeatureCollection") {
    raise(errc::not_feature_collection, "top-level type is not FeatureCollection");
  }
  const auto features = doc.find("features");
  if (features == doc.end() || !features->is_array()) {
    raise(errc::not_feature_collection, "missing features array");
  }

  RegionSet set;
  std::unordered_set<std::string> seen_ids;
  for (const json& feature : *features) {
    if (!feature.is_object() || feature.value("type", std::string()) != "Feature") {
      raise(errc::not_feature_collection, "features array holds a non-Feature entry");
    }
    const auto props = feature.find("properties");
    if (props == feature.end() || !props->is_object() || !props->contains("id") ||
        !(*props)["id"].is_string()) {
      raise(errc::missing_id, "feature without a string properties.id");
    }
    Region region;
    region.id = (*props)["id"].get<std::string>();
    if (!seen_ids.insert(region.id).second) {
      raise(errc::duplicate_id, "duplicate region id '" + region.id + "'");
    }
    region.name = region.id;
    if (props->contains("name") && (*props)["name"].is_string()) {
      region.name = (*props)["name"].get<std::string>();
    }

    const auto geometry = feature.find("geometry");
    if (geometry == feature.end() || !geometry->is_object()) {
      raise(errc::unsupported_geometry_type,
            "feature '" + region.id + "' has no geometry object");
    }
    const std::string geom_type = geometry->value("type", std::string());
    const auto coords = geometry->find("coordinates");
    if (coords == geometry->end()) {
      raise(errc::unsupported_geometry_type,
            "feature '" + region.id + "' geometry has no coordinates");
    }
    if (geom_type == "Polygon") {
      region.polygons.push_back(parse_polygon_rings(*coords, region.id));
    } else if (geom_type == "MultiPolygon") {
      if (!coords->is_array() || coords->empty()) {
        raise(errc::degenerate_ring,
              "feature '" + region.id + "': MultiPolygon has no polygons");
      }
      for (const json& polygon : *coords) {
        region.polygons.push_back(parse_polygon_rings(polygon, region.id));
      }
    } else {
      raise(errc::unsupported_geometry_type,
            "feature '" + region.id + "' has geometry type '" + geom_type + "'");
    }
    region.compute_bounds();
    set.regions.push_back(std::move(region));
  }
  return set;
}

RegionSet parse_geojson_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(errc::io_failure, "cannot open '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    raise(errc::io_failure, "read failure on '" + path.string() + "'");
  }
  return parse_geojson(buffer.str());
}

std::string emit_geojson(const RegionSet& regions) {
  json features = json::array();
  for (const Region& region : regions.regions) {
    json polygons = json::array();
    for (const Polygon& polygon : region.polygons) {
      json rings = json::array();
      auto append_ring = [&rings](const Ring& ring) {
        json coords = json::array();
        for (const Point& p : ring) coords.push_back(json::array({p.x, p.y}));
        coords.push_back(json::array({ring.front().x, ring.front().y}));
        rings.push_back(std::move(coords));
      };
      append_ring(polygon.outer);
      for (const Ring& hole : polygon.holes) append_ring(hole);
      polygons.push_back(std::move(rings));
    }
    json geometry;
    if (polygons.size() == 1) {
      geometry = json{{"type", "Polygon"}, {"coordinates", polygons[0]}};
    } else {
      geometry = json{{"type", "MultiPolygon"}, {"coordinates", polygons}};
    }
    features.push_back(json{{"type", "Feature"},
                            {"properties", {{"id", region.id}, {"name", region.name}}},
                            {"geometry", geometry}});
  }
  json doc{{"type", "FeatureCollection"}, {"features", features}};
  return doc.dump(2) + "\n";
}

}  // namespace pwam

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <vector>

#include "pwam/errors.hpp"
#include "pwam/geojson.hpp"
#include "pwam/geometry.hpp"
#include "pwam/membership.hpp"
#include "pwam/synth.hpp"
#include "support/test_support.hpp"

using namespace pwam;

namespace {

Ring unit_square() {
  return Ring{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
}

std::string square_feature(const std::string& id, double x0, double y0, double x1,
                           double y1, bool with_name = false) {
  std::string props = "{\"id\": \"" + id + "\"";
  if (with_name) props += ", \"name\": \"" + id + " city\"";
  props += "}";
  char buffer[512];
  std::snprintf(buffer, sizeof(buffer),
                "{\"type\": \"Feature\", \"properties\": %s, \"geometry\": {"
                "\"type\": \"Polygon\", \"coordinates\": [[[%g,%g],[%g,%g],[%g,%g],"
                "[%g,%g],[%g,%g]]]}}",
                props.c_str(), x0, y0, x1, y0, x1, y1, x0, y1, x0, y0);
  return buffer;
}

std::string collection(const std::vector<std::string>& features) {
  std::string out = "{\"type\": \"FeatureCollection\", \"features\": [";
  for (std::size_t i = 0; i < features.size(); ++i) {
    if (i) out += ",";
    out += features[i];
  }
  out += "]}";
  return out;
}

}  // namespace

TEST_CASE("normalize_ring drops closure and duplicates, rejects degenerate rings") {
  Ring closed{{0, 0}, {1, 0}, {1, 0}, {1, 1}, {0, 0}};
  const Ring normalized = normalize_ring(closed);
  CHECK(normalized.size() == 3);
  try {
    normalize_ring(Ring{{0, 0}, {1, 1}, {0, 0}});
    FAIL("expected DegenerateRing");
  } catch (const Error& e) {
    CHECK(e.code() == errc::degenerate_ring);
  }
}

TEST_CASE("point_in_ring basics") {
  const Ring square = unit_square();
  CHECK(point_in_ring(Point{0.5, 0.5}, square));
  CHECK_FALSE(point_in_ring(Point{1.5, 0.5}, square));

  Polygon with_hole;
  with_hole.outer = square;
  with_hole.holes.push_back(Ring{{0.25, 0.25}, {0.75, 0.25}, {0.75, 0.75}, {0.25, 0.75}});
  CHECK_FALSE(point_in_polygon(Point{0.5, 0.5}, with_hole));
  CHECK(point_in_polygon(Point{0.1, 0.1}, with_hole));
}

TEST_CASE("convex polygon contains its vertex centroid") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    // a convex polygon: points on a circle, in angular order
    Ring ring;
    const std::size_t n = 3 + static_cast<std::size_t>(synth::unit_double(seed, 31, 0) * 7);
    for (std::size_t k = 0; k < n; ++k) {
      const double angle = 2.0 * 3.14159265358979323846 *
                           (static_cast<double>(k) +
                            0.7 * synth::unit_double(seed, 32, k)) /
                           static_cast<double>(n);
      const double radius = 2.0 + synth::unit_double(seed, 33, 0) * 3.0;
      ring.push_back(Point{radius * std::cos(angle), radius * std::sin(angle)});
    }
    Point centroid{0, 0};
    for (const Point& p : ring) {
      centroid.x += p.x;
      centroid.y += p.y;
    }
    centroid.x /= static_cast<double>(ring.size());
    centroid.y /= static_cast<double>(ring.size());
    CHECK(point_in_ring(centroid, ring));
  }
}

TEST_CASE("ray casting agrees with a winding-number oracle away from edges") {
  std::size_t compared = 0;
  for (std::uint64_t instance = 0; instance < 20; ++instance) {
    const Ring ring = testsup::random_star_ring(500 + instance, 77);
    const BoundingBox box = ring_bounds(ring);
    for (std::uint64_t k = 0; k < 500; ++k) {
      const Point p{
          box.xmin - 1.0 + synth::unit_double(instance, 41, k) * (box.xmax - box.xmin + 2.0),
          box.ymin - 1.0 + synth::unit_double(instance, 42, k) * (box.ymax - box.ymin + 2.0)};
      if (testsup::min_edge_distance(p, ring) < 1e-12) continue;
      ++compared;
      CHECK(point_in_ring(p, ring) == testsup::winding_inside(p, ring));
    }
  }
  CHECK(compared >= 9000);
}

TEST_CASE("shared-edge points belong to exactly one rectangle") {
  // two unit squares sharing the edge x = 1
  Polygon left;
  left.outer = unit_square();
  Polygon right;
  right.outer = Ring{{1, 0}, {2, 0}, {2, 1}, {1, 1}};
  for (std::uint64_t k = 0; k < 100; ++k) {
    const double y = 0.001 + 0.998 * synth::unit_double(9, 51, k);
    const Point p{1.0, y};
    const int owners = static_cast<int>(point_in_polygon(p, left)) +
                       static_cast<int>(point_in_polygon(p, right));
    CHECK(owners == 1);
  }
}

TEST_CASE("parse_geojson handles the documented cases") {
  SUBCASE("single square polygon") {
    const RegionSet set = parse_geojson(collection({square_feature("A", 0, 0, 1, 1)}));
    REQUIRE(set.regions.size() == 1);
    CHECK(set.regions[0].id == "A");
    CHECK(set.regions[0].name == "A");  // name defaults to id
    REQUIRE(set.regions[0].polygons.size() == 1);
    CHECK(set.regions[0].polygons[0].outer.size() == 4);
    CHECK(set.regions[0].polygons[0].holes.empty());
  }
  SUBCASE("name property is honored") {
    const RegionSet set =
        parse_geojson(collection({square_feature("A", 0, 0, 1, 1, true)}));
    CHECK(set.regions[0].name == "A city");
  }
  SUBCASE("duplicate ids") {
    try {
      parse_geojson(collection(
          {square_feature("A", 0, 0, 1, 1), square_feature("A", 2, 0, 3, 1)}));
      FAIL("expected DuplicateId");
    } catch (const Error& e) {
      CHECK(e.code() == errc::duplicate_id);
    }
  }
  SUBCASE("line strings are rejected") {
    const std::string feature =
        "{\"type\": \"Feature\", \"properties\": {\"id\": \"L\"}, \"geometry\": "
        "{\"type\": \"LineString\", \"coordinates\": [[0,0],[1,1]]}}";
    try {
      parse_geojson(collection({feature}));
      FAIL("expected UnsupportedGeometryType");
    } catch (const Error& e) {
      CHECK(e.code() == errc::unsupported_geometry_type);
    }
  }
  SUBCASE("missing id") {
    const std::string feature =
        "{\"type\": \"Feature\", \"properties\": {}, \"geometry\": {\"type\": "
        "\"Polygon\", \"coordinates\": [[[0,0],[1,0],[1,1],[0,1],[0,0]]]}}";
    try {
      parse_geojson(collection({feature}));
      FAIL("expected MissingId");
    } catch (const Error& e) {
      CHECK(e.code() == errc::missing_id);
    }
  }
  SUBCASE("not a feature collection") {
    try {
      parse_geojson("{\"type\": \"Feature\"}");
      FAIL("expected NotFeatureCollection");
    } catch (const Error& e) {
      CHECK(e.code() == errc::not_feature_collection);
    }
  }
  SUBCASE("multipolygon contributes several polygons") {
    const std::string feature =
        "{\"type\": \"Feature\", \"properties\": {\"id\": \"M\"}, \"geometry\": "
        "{\"type\": \"MultiPolygon\", \"coordinates\": ["
        "[[[0,0],[1,0],[1,1],[0,1],[0,0]]],"
        "[[[2,0],[3,0],[3,1],[2,1],[2,0]]]]}}";
    const RegionSet set = parse_geojson(collection({feature}));
    REQUIRE(set.regions.size() == 1);
    CHECK(set.regions[0].polygons.size() == 2);
    CHECK(region_contains(set.regions[0], Point{0.5, 0.5}));
    CHECK(region_contains(set.regions[0], Point{2.5, 0.5}));
    CHECK_FALSE(region_contains(set.regions[0], Point{1.5, 0.5}));
  }
}

TEST_CASE("geojson round-trips through emit_geojson") {
  const RegionSet set = parse_geojson(collection(
      {square_feature("A", 0, 0, 1, 1, true), square_feature("B", 2, 0, 3.5, 1.25)}));
  const RegionSet back = parse_geojson(emit_geojson(set));
  REQUIRE(back.regions.size() == set.regions.size());
  for (std::size_t i = 0; i < set.regions.size(); ++i) {
    CHECK(back.regions[i].id == set.regions[i].id);
    CHECK(back.regions[i].name == set.regions[i].name);
    REQUIRE(back.regions[i].polygons.size() == set.regions[i].polygons.size());
    const Ring& a = back.regions[i].polygons[0].outer;
    const Ring& b = set.regions[i].polygons[0].outer;
    REQUIRE(a.size() == b.size());
    for (std::size_t v = 0; v < a.size(); ++v) {
      CHECK(a[v].x == b[v].x);
      CHECK(a[v].y == b[v].y);
    }
  }
}

TEST_CASE("membership over documented cases") {
  GridGeometry g;
  g.ncols = 2;
  g.nrows = 2;
  g.xll = 0.0;
  g.yll = 0.0;
  g.cellsize = 1.0;

  SUBCASE("one region covering everything") {
    const RegionSet set = parse_geojson(collection({square_feature("A", 0, 0, 2, 2)}));
    const RegionMembership m = build_membership(g, set);
    CHECK(m.cell_count(0) == 4);
    CHECK(m.unassigned_count() == 0);
  }
  SUBCASE("two disjoint squares each covering one cell center") {
    const RegionSet set = parse_geojson(collection(
        {square_feature("A", 0, 1, 1, 2), square_feature("B", 1, 0, 2, 1)}));
    const RegionMembership m = build_membership(g, set);
    CHECK(m.cell_count(0) == 1);
    CHECK(m.cell_count(1) == 1);
    CHECK(m.unassigned_count() == 2);
    // brute force over the 4 centers
    for (std::uint32_t r = 0; r < 2; ++r) {
      for (std::uint32_t c = 0; c < 2; ++c) {
        const auto [x, y] = cell_center(g, r, c);
        int expected = RegionMembership::kUnassigned;
        for (std::size_t region = 0; region < set.regions.size(); ++region) {
          if (region_contains(set.regions[region], Point{x, y})) {
            expected = static_cast<int>(region);
            break;
          }
        }
        CHECK(m.region_at(static_cast<std::size_t>(r) * 2 + c) == expected);
      }
    }
  }
  SUBCASE("overlapping regions resolve to the earlier-listed one") {
    const RegionSet set = parse_geojson(collection(
        {square_feature("first", 0, 0, 2, 2), square_feature("second", 0, 0, 2, 2)}));
    const RegionMembership m = build_membership(g, set);
    CHECK(m.cell_count(0) == 4);
    CHECK(m.cell_count(1) == 0);
  }
}

TEST_CASE("membership is a partition and permutation-stable for disjoint regions") {
  for (std::uint64_t seed = 900; seed < 910; ++seed) {
    synth::ScenarioSpec spec = synth::default_scenario();
    spec.seed = seed;
    spec.nrows = 6 + static_cast<std::uint32_t>(synth::unit_double(seed, 61, 0) * 8);
    spec.ncols = 6 + static_cast<std::uint32_t>(synth::unit_double(seed, 62, 0) * 8);
    spec.n_regions = 2 + static_cast<std::uint32_t>(synth::unit_double(seed, 63, 0) * 6);
    spec.years = 1;
    const synth::ScenarioData data = synth::generate(spec);

    const RegionMembership m = build_membership(data.coarse, data.regions);
    std::uint64_t assigned = 0;
    for (std::size_t r = 0; r < m.region_count(); ++r) assigned += m.cell_count(r);
    CHECK(assigned + m.unassigned_count() == data.coarse.cell_count());

    // permute the (disjoint) regions: every cell keeps its region id
    RegionSet permuted;
    std::vector<std::size_t> order(data.regions.regions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::reverse(order.begin(), order.end());
    for (std::size_t i : order) permuted.regions.push_back(data.regions.regions[i]);
    const RegionMembership m2 = build_membership(data.coarse, permuted);
    for (std::size_t i = 0; i < data.coarse.cell_count(); ++i) {
      const std::int32_t a = m.region_at(i);
      const std::int32_t b = m2.region_at(i);
      REQUIRE(a != RegionMembership::kUnassigned);  // partitions cover the grid
      REQUIRE(b != RegionMembership::kUnassigned);
      CHECK(data.regions.regions[static_cast<std::size_t>(a)].id ==
            permuted.regions[static_cast<std::size_t>(b)].id);
    }

    // membership is identical at any thread count
    MembershipOptions four;
    four.threads = 4;
    const RegionMembership m3 = build_membership(data.coarse, data.regions, four);
    for (std::size_t i = 0; i < data.coarse.cell_count(); ++i) {
      CHECK(m.region_at(i) == m3.region_at(i));
    }
  }
}

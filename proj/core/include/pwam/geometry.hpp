#pragma once

#include <string>
#include <vector>

namespace pwam {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

// Linear ring, stored open: the GeoJSON closing vertex (a repeat of the
// first) is dropped on normalization. Must keep at least 3 vertices.
using Ring = std::vector<Point>;

struct BoundingBox {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  bool contains(const Point& p) const {
    return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax;
  }
  void expand(const Point& p);
  void expand(const BoundingBox& other);
};

BoundingBox ring_bounds(const Ring& ring);

// One outer ring plus zero or more holes.
struct Polygon {
  Ring outer;
  std::vector<Ring> holes;
};

// A named region: one or more polygons (a GeoJSON Polygon contributes one,
// a MultiPolygon several).
struct Region {
  std::string id;
  std::string name;
  std::vector<Polygon> polygons;
  BoundingBox bounds;

  void compute_bounds();
};

struct RegionSet {
  std::vector<Region> regions;
};

// Drops a trailing vertex equal to the first and collapses consecutive
// duplicates. Throws errc::degenerate_ring if fewer than 3 distinct
// vertices remain.
Ring normalize_ring(Ring ring);

// Even-odd ray casting. Edges are treated half-open in y so a point on a
// horizontal grid line is claimed by exactly one of two rings that share
// that boundary.
bool point_in_ring(const Point& p, const Ring& ring);

// Inside the outer ring and outside every hole.
bool point_in_polygon(const Point& p, const Polygon& polygon);

bool region_contains(const Region& region, const Point& p);

}  // namespace pwam

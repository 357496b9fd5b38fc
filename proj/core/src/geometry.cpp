#include "pwam/geometry.hpp"

#include <limits>

#include "pwam/errors.hpp"

namespace pwam {

void BoundingBox::expand(const Point& p) {
  if (p.x < xmin) xmin = p.x;
  if (p.x > xmax) xmax = p.x;
  if (p.y < ymin) ymin = p.y;
  if (p.y > ymax) ymax = p.y;
}

void BoundingBox::expand(const BoundingBox& other) {
  if (other.xmin < xmin) xmin = other.xmin;
  if (other.xmax > xmax) xmax = other.xmax;
  if (other.ymin < ymin) ymin = other.ymin;
  if (other.ymax > ymax) ymax = other.ymax;
}

BoundingBox ring_bounds(const Ring& ring) {
  BoundingBox box{std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity(),
                  -std::numeric_limits<double>::infinity()};
  for (const Point& p : ring) box.expand(p);
  return box;
}

void Region::compute_bounds() {
  bounds = BoundingBox{std::numeric_limits<double>::infinity(),
                       std::numeric_limits<double>::infinity(),
                       -std::numeric_limits<double>::infinity(),
                       -std::numeric_limits<double>::infinity()};
  for (const Polygon& polygon : polygons) bounds.expand(ring_bounds(polygon.outer));
}

Ring normalize_ring(Ring ring) {
  while (ring.size() > 1 && ring.back() == ring.front()) ring.pop_back();
  Ring out;
  out.reserve(ring.size());
  for (const Point& p : ring) {
    if (out.empty() || !(out.back() == p)) out.push_back(p);
  }
  if (out.size() < 3) {
    raise(errc::degenerate_ring, "ring has fewer than 3 distinct vertices");
  }
  return out;
}

bool point_in_ring(const Point& p, const Ring& ring) {
  bool inside = false;
  const std::size_t n = ring.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const Point& a = ring[j];
    const Point& b = ring[i];
    // Half-open in y: an edge covers [min(a.y,b.y), max(a.y,b.y)).
    if ((a.y > p.y) != (b.y > p.y)) {
      const double x_cross = a.x + (b.x - a.x) * ((p.y - a.y) / (b.y - a.y));
      if (p.x < x_cross) inside = !inside;
    }
  }
  return inside;
}

bool point_in_polygon(const Point& p, const Polygon& polygon) {
  if (!point_in_ring(p, polygon.outer)) return false;
  for (const Ring& hole : polygon.holes) {
    if (point_in_ring(p, hole)) return false;
  }
  return true;
}

bool region_contains(const Region& region, const Point& p) {
  if (!region.bounds.contains(p)) return false;
  for (const Polygon& polygon : region.polygons) {
    if (point_in_polygon(p, polygon)) return true;
  }
  return false;
}

}  // namespace pwam

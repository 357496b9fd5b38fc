#include "pwam/membership.hpp"

#include <utility>

#include "pwam/parallel.hpp"

namespace pwam {

RegionMembership::RegionMembership(GridGeometry geometry,
                                   std::vector<std::int32_t> assignment,
                                   std::vector<std::uint64_t> cell_counts)
    : geometry_(geometry),
      assignment_(std::move(assignment)),
      cell_counts_(std::move(cell_counts)) {}

std::uint64_t RegionMembership::unassigned_count() const {
  std::uint64_t assigned = 0;
  for (std::uint64_t k : cell_counts_) assigned += k;
  return geometry_.cell_count() - assigned;
}

RegionMembership build_membership(const GridGeometry& geometry, const RegionSet& regions,
                                  const MembershipOptions& options) {
  geometry.validate();
  const std::size_t region_count = regions.regions.size();
  std::vector<std::int32_t> assignment(geometry.cell_count(),
                                       RegionMembership::kUnassigned);

  parallel::for_each_index(geometry.nrows, options.threads, [&](std::size_t row) {
    const double y = geometry.yll +
                     (static_cast<double>(geometry.nrows - row) - 0.5) * geometry.cellsize;
    // Regions whose y-span covers this row, in input (precedence) order.
    std::vector<std::uint32_t> candidates;
    for (std::uint32_t r = 0; r < region_count; ++r) {
      const BoundingBox& b = regions.regions[r].bounds;
      if (y >= b.ymin && y <= b.ymax) candidates.push_back(r);
    }
    if (candidates.empty()) return;

    std::int32_t* out = assignment.data() + row * geometry.ncols;
    for (std::uint32_t col = 0; col < geometry.ncols; ++col) {
      const double x = geometry.xll + (static_cast<double>(col) + 0.5) * geometry.cellsize;
      const Point center{x, y};
      for (std::uint32_t r : candidates) {
        if (region_contains(regions.regions[r], center)) {
          out[col] = static_cast<std::int32_t>(r);
          break;
        }
      }
    }
  });

  std::vector<std::uint64_t> counts(region_count, 0);
  for (std::int32_t r : assignment) {
    if (r != RegionMembership::kUnassigned) ++counts[static_cast<std::size_t>(r)];
  }
  return RegionMembership(geometry, std::move(assignment), std::move(counts));
}

}  // namespace pwam

#pragma once

#include <cstdint>
#include <vector>

#include "pwam/geometry.hpp"
#include "pwam/grid.hpp"

namespace pwam {

// Region assignment for every cell of a (coarse) grid. A cell belongs to at
// most one region; overlaps resolve to the first-listed region.
class RegionMembership {
 public:
  static constexpr std::int32_t kUnassigned = -1;

  RegionMembership(GridGeometry geometry, std::vector<std::int32_t> assignment,
                   std::vector<std::uint64_t> cell_counts);

  const GridGeometry& geometry() const { return geometry_; }

  // Region index for a cell, or kUnassigned.
  std::int32_t region_at(std::size_t index) const { return assignment_[index]; }
  const std::vector<std::int32_t>& assignment() const { return assignment_; }

  // The k of the weighted-mean formula: cells assigned to each region.
  std::uint64_t cell_count(std::size_t region_index) const {
    return cell_counts_[region_index];
  }
  std::size_t region_count() const { return cell_counts_.size(); }
  std::uint64_t unassigned_count() const;

 private:
  GridGeometry geometry_;
  std::vector<std::int32_t> assignment_;
  std::vector<std::uint64_t> cell_counts_;
};

struct MembershipOptions {
  unsigned threads = 1;
};

// Assigns each cell of `geometry` to the first region (in input order) that
// contains the cell's center. Candidate regions are prefiltered by bounding
// box.
RegionMembership build_membership(const GridGeometry& geometry, const RegionSet& regions,
                                  const MembershipOptions& options = {});

}  // namespace pwam

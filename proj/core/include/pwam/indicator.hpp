#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pwam/geometry.hpp"
#include "pwam/grid.hpp"
#include "pwam/membership.hpp"

namespace pwam {

// Synthetic region id for the study-area (all assigned cells) record.
inline constexpr const char* kStudyAreaId = "__ALL__";

struct IndicatorRecord {
  std::string region_id;
  std::string name;
  int year = 0;
  std::optional<double> pwam;      // µg/m³; empty when no population
  double total_population = 0.0;   // persons over valid-concentration cells
  std::uint64_t valid_cells = 0;   // cells with valid concentration and pop > 0
};

struct PwamResult {
  std::optional<double> pwam;
  double total_population = 0.0;
  std::uint64_t valid_cells = 0;
};

// Population-weighted mean concentration over the given cells:
//   pwam = Σ p_i·c_i / Σ p_i
// Cells with nodata concentration drop out of both sums; population nodata
// counts as 0 persons. Undefined (empty pwam) when the denominator is 0.
// `cells` must be ascending for reproducible summation. Internally the mean
// is evaluated as cmin + Σ p·(c − cmin) / Σ p with compensated sums and the
// result clamped to [cmin, cmax], so a uniform concentration field yields
// that value exactly and the weighted-mean bounds always hold.
PwamResult compute_pwam(const Grid& concentration, const Grid& population,
                        std::span<const std::size_t> cells);

// One record per region in RegionSet order, then one study-area record
// (kStudyAreaId) over the union of all assigned cells. Per-region sums run
// in ascending cell order, so each record is bit-identical to compute_pwam
// over that region's cell list.
std::vector<IndicatorRecord> compute_all(const Grid& concentration, const Grid& population,
                                         const RegionMembership& membership,
                                         const RegionSet& regions, int year);

struct IntervalScheme {
  std::vector<double> breaks;       // strictly ascending, all > 0
  std::vector<std::string> labels;  // "0-35", "35-50", ..., ">100"

  static IntervalScheme with_breaks(std::vector<double> breaks);
  static IntervalScheme default_scheme();

  std::size_t interval_count() const { return breaks.size() + 1; }
};

// 0-based index of the half-open interval [l, u) containing `pwam`:
// equivalently, the count of breaks ≤ pwam.
std::size_t classify(std::optional<double> pwam, const IntervalScheme& scheme);

struct ExposureDistribution {
  int year = 0;
  std::vector<double> shares;  // one fraction per interval
  double classified_population = 0.0;
};

// Population share per interval over the records with a defined pwam
// (records for the study-area id are ignored). Per-interval sums run over
// ascending population values, so the result is independent of record
// order. All shares are 0 when nothing is classifiable.
ExposureDistribution exposure_distribution(std::span<const IndicatorRecord> records,
                                           const IntervalScheme& scheme, int year);

struct TargetAttainment {
  std::uint64_t count = 0;          // defined-pwam records with pwam < target
  double population_share = 0.0;    // their share of all defined-pwam population
};

TargetAttainment count_below_target(std::span<const IndicatorRecord> records,
                                    double target = 35.0);

// Earliest year whose record has a defined pwam strictly below the target.
// Throws errc::duplicate_year on duplicate years.
std::optional<int> first_crossing_year(std::span<const IndicatorRecord> series,
                                       double target);

}  // namespace pwam

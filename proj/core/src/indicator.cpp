#include "pwam/indicator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "pwam/errors.hpp"
#include "pwam/summation.hpp"
#include "pwam/text.hpp"

namespace pwam {

namespace {

// Per-region accumulation state shared by compute_pwam and compute_all.
struct PwamAccumulator {
  double cmin = std::numeric_limits<double>::infinity();
  double cmax = -std::numeric_limits<double>::infinity();
  CompensatedSum shifted_numerator;  // Σ p·(c − cmin)
  CompensatedSum denominator;        // Σ p
  std::uint64_t valid_cells = 0;

  void observe_bounds(double c, double p) {
    if (p == 0.0) return;
    if (c < cmin) cmin = c;
    if (c > cmax) cmax = c;
  }

  void accumulate(double c, double p) {
    shifted_numerator.add(p * (c - cmin));
    denominator.add(p);
    if (p > 0.0) ++valid_cells;
  }

  PwamResult finish() const {
    PwamResult result;
    result.total_population = denominator.value();
    result.valid_cells = valid_cells;
    if (result.total_population == 0.0) {
      result.total_population = 0.0;  // collapse -0 from cancellation
      return result;
    }
    double pwam = cmin + shifted_numerator.value() / result.total_population;
    if (cmin <= cmax) pwam = std::clamp(pwam, cmin, cmax);
    result.pwam = pwam;
    return result;
  }
};

void check_same_extent(const Grid& concentration, const Grid& population) {
  if (!concentration.geometry().same_extent(population.geometry())) {
    raise(errc::geometry_mismatch,
          "concentration and population grids have different geometry");
  }
}

double population_at(const Grid& population, std::size_t index) {
  return population.valid(index) ? population.values()[index] : 0.0;
}

}  // namespace

PwamResult compute_pwam(const Grid& concentration, const Grid& population,
                        std::span<const std::size_t> cells) {
  check_same_extent(concentration, population);
  const std::size_t cell_count = concentration.geometry().cell_count();
  PwamAccumulator acc;
  for (std::size_t index : cells) {
    if (index >= cell_count) {
      raise(errc::index_out_of_range, "cell index beyond grid size");
    }
    if (!concentration.valid(index)) continue;
    acc.observe_bounds(concentration.values()[index], population_at(population, index));
  }
  for (std::size_t index : cells) {
    if (!concentration.valid(index)) continue;
    acc.accumulate(concentration.values()[index], population_at(population, index));
  }
  return acc.finish();
}

std::vector<IndicatorRecord> compute_all(const Grid& concentration, const Grid& population,
                                         const RegionMembership& membership,
                                         const RegionSet& regions, int year) {
  check_same_extent(concentration, population);
  if (!concentration.geometry().same_extent(membership.geometry())) {
    raise(errc::geometry_mismatch, "membership geometry differs from grids");
  }
  const std::size_t region_count = regions.regions.size();
  std::vector<PwamAccumulator> acc(region_count);
  PwamAccumulator all;

  const std::size_t cell_count = concentration.geometry().cell_count();
  // Pass 1: concentration bounds per region (and study area).
  for (std::size_t i = 0; i < cell_count; ++i) {
    const std::int32_t r = membership.region_at(i);
    if (r == RegionMembership::kUnassigned || !concentration.valid(i)) continue;
    const double c = concentration.values()[i];
    const double p = population_at(population, i);
    acc[static_cast<std::size_t>(r)].observe_bounds(c, p);
    all.observe_bounds(c, p);
  }
  // Pass 2: sums, in ascending cell order for every accumulator.
  for (std::size_t i = 0; i < cell_count; ++i) {
    const std::int32_t r = membership.region_at(i);
    if (r == RegionMembership::kUnassigned || !concentration.valid(i)) continue;
    const double c = concentration.values()[i];
    const double p = population_at(population, i);
    acc[static_cast<std::size_t>(r)].accumulate(c, p);
    all.accumulate(c, p);
  }

  std::vector<IndicatorRecord> records;
  records.reserve(region_count + 1);
  for (std::size_t r = 0; r < region_count; ++r) {
    const PwamResult result = acc[r].finish();
    records.push_back(IndicatorRecord{regions.regions[r].id, regions.regions[r].name,
                                      year, result.pwam, result.total_population,
                                      result.valid_cells});
  }
  const PwamResult result = all.finish();
  records.push_back(IndicatorRecord{kStudyAreaId, kStudyAreaId, year, result.pwam,
                                    result.total_population, result.valid_cells});
  return records;
}

IntervalScheme IntervalScheme::with_breaks(std::vector<double> breaks) {
  if (breaks.empty()) {
    raise(errc::non_ascending_breaks, "breaks list is empty");
  }
  double previous = 0.0;
  for (double b : breaks) {
    if (!std::isfinite(b) || b <= previous) {
      raise(errc::non_ascending_breaks,
            "breaks must be finite, positive, and strictly ascending");
    }
    previous = b;
  }
  IntervalScheme scheme;
  scheme.labels.reserve(breaks.size() + 1);
  scheme.labels.push_back("0-" + format_number(breaks.front()));
  for (std::size_t i = 1; i < breaks.size(); ++i) {
    scheme.labels.push_back(format_number(breaks[i - 1]) + "-" + format_number(breaks[i]));
  }
  scheme.labels.push_back(">" + format_number(breaks.back()));
  scheme.breaks = std::move(breaks);
  return scheme;
}

IntervalScheme IntervalScheme::default_scheme() {
  return with_breaks({35.0, 50.0, 75.0, 100.0});
}

std::size_t classify(std::optional<double> pwam, const IntervalScheme& scheme) {
  if (!pwam.has_value()) {
    raise(errc::undefined_input, "cannot classify an undefined pwam");
  }
  if (!(*pwam >= 0.0)) {
    raise(errc::negative_input, "pwam must be >= 0");
  }
  // Count of breaks ≤ value: [0,b0) -> 0, [b0,b1) -> 1, ..., [blast,∞) -> n.
  const auto it = std::upper_bound(scheme.breaks.begin(), scheme.breaks.end(), *pwam);
  return static_cast<std::size_t>(it - scheme.breaks.begin());
}

ExposureDistribution exposure_distribution(std::span<const IndicatorRecord> records,
                                           const IntervalScheme& scheme, int year) {
  ExposureDistribution dist;
  dist.year = year;
  dist.shares.assign(scheme.interval_count(), 0.0);

  std::vector<std::vector<double>> buckets(scheme.interval_count());
  for (const IndicatorRecord& record : records) {
    if (record.region_id == kStudyAreaId || !record.pwam.has_value()) continue;
    buckets[classify(record.pwam, scheme)].push_back(record.total_population);
  }

  std::vector<double> bucket_totals(scheme.interval_count(), 0.0);
  CompensatedSum classified;
  for (std::size_t j = 0; j < buckets.size(); ++j) {
    std::sort(buckets[j].begin(), buckets[j].end());
    CompensatedSum sum;
    for (double p : buckets[j]) sum.add(p);
    bucket_totals[j] = sum.value();
    classified.add(bucket_totals[j]);
  }
  dist.classified_population = classified.value();
  if (dist.classified_population > 0.0) {
    for (std::size_t j = 0; j < buckets.size(); ++j) {
      dist.shares[j] = bucket_totals[j] / dist.classified_population;
    }
  }
  return dist;
}

TargetAttainment count_below_target(std::span<const IndicatorRecord> records,
                                    double target) {
  TargetAttainment result;
  CompensatedSum below, defined;
  for (const IndicatorRecord& record : records) {
    if (record.region_id == kStudyAreaId || !record.pwam.has_value()) continue;
    defined.add(record.total_population);
    if (*record.pwam < target) {
      ++result.count;
      below.add(record.total_population);
    }
  }
  const double defined_total = defined.value();
  if (defined_total > 0.0) {
    result.population_share = below.value() / defined_total;
  }
  return result;
}

std::optional<int> first_crossing_year(std::span<const IndicatorRecord> series,
                                       double target) {
  std::vector<const IndicatorRecord*> ordered;
  ordered.reserve(series.size());
  for (const IndicatorRecord& record : series) ordered.push_back(&record);
  std::stable_sort(ordered.begin(), ordered.end(),
                   [](const IndicatorRecord* a, const IndicatorRecord* b) {
                     return a->year < b->year;
                   });
  for (std::size_t i = 1; i < ordered.size(); ++i) {
    if (ordered[i]->year == ordered[i - 1]->year) {
      raise(errc::duplicate_year,
            "duplicate year " + std::to_string(ordered[i]->year) + " in series");
    }
  }
  for (const IndicatorRecord* record : ordered) {
    if (record->pwam.has_value() && *record->pwam < target) return record->year;
  }
  return std::nullopt;
}

}  // namespace pwam

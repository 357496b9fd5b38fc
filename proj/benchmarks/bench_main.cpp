#include <benchmark/benchmark.h>

#include <sstream>
#include <vector>

#include "pwam/aggregate.hpp"
#include "pwam/geometry.hpp"
#include "pwam/grid_io.hpp"
#include "pwam/indicator.hpp"
#include "pwam/membership.hpp"
#include "pwam/synth.hpp"

namespace {

pwam::synth::ScenarioSpec bench_spec(std::uint32_t size, std::uint32_t refinement,
                                     std::uint32_t regions) {
  pwam::synth::ScenarioSpec spec = pwam::synth::default_scenario();
  spec.nrows = size;
  spec.ncols = size;
  spec.refinement = refinement;
  spec.n_regions = regions;
  spec.years = 1;
  spec.seed = 99;
  return spec;
}

void BM_aggregate_population(benchmark::State& state) {
  const auto data = pwam::synth::generate(
      bench_spec(static_cast<std::uint32_t>(state.range(0)), 8, 4));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pwam::aggregate_population(data.population, data.coarse));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(data.fine.cell_count()));
}
BENCHMARK(BM_aggregate_population)->Arg(32)->Arg(64)->Arg(128);

void BM_build_membership(benchmark::State& state) {
  const auto data = pwam::synth::generate(
      bench_spec(static_cast<std::uint32_t>(state.range(0)), 1, 16));
  for (auto _ : state) {
    benchmark::DoNotOptimize(pwam::build_membership(data.coarse, data.regions));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(data.coarse.cell_count()));
}
BENCHMARK(BM_build_membership)->Arg(64)->Arg(256);

void BM_compute_all(benchmark::State& state) {
  const auto data = pwam::synth::generate(
      bench_spec(static_cast<std::uint32_t>(state.range(0)), 2, 9));
  const pwam::Grid population = pwam::aggregate_population(data.population, data.coarse);
  const pwam::RegionMembership membership =
      pwam::build_membership(data.coarse, data.regions);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pwam::compute_all(data.concentration[0], population,
                                               membership, data.regions, 2000));
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(data.coarse.cell_count()));
}
BENCHMARK(BM_compute_all)->Arg(64)->Arg(256);

void BM_ascii_grid_roundtrip(benchmark::State& state) {
  const auto data = pwam::synth::generate(
      bench_spec(static_cast<std::uint32_t>(state.range(0)), 1, 1));
  const std::string text = pwam::write_ascii_grid(data.concentration[0]);
  for (auto _ : state) {
    benchmark::DoNotOptimize(pwam::read_ascii_grid(text));
  }
  state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) *
                          static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_ascii_grid_roundtrip)->Arg(64)->Arg(128);

void BM_point_in_polygon(benchmark::State& state) {
  const auto data = pwam::synth::generate(bench_spec(32, 1, 25));
  const pwam::Region& region = data.regions.regions[12];
  double x = region.bounds.xmin;
  const double step = (region.bounds.xmax - region.bounds.xmin) / 257.0;
  const double y = (region.bounds.ymin + region.bounds.ymax) / 2.0;
  for (auto _ : state) {
    x += step;
    if (x > region.bounds.xmax) x = region.bounds.xmin;
    benchmark::DoNotOptimize(pwam::region_contains(region, pwam::Point{x, y}));
  }
}
BENCHMARK(BM_point_in_polygon);

}  // namespace

BENCHMARK_MAIN();

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pwam/charts.hpp"
#include "pwam/csv.hpp"
#include "pwam/errors.hpp"
#include "pwam/indicator.hpp"
#include "pwam/manifest.hpp"
#include "pwam/pipeline.hpp"
#include "pwam/synth.hpp"
#include "pwam/text.hpp"
#include "pwam/version.hpp"

namespace {

int cmd_compute(const std::string& manifest_path, std::optional<unsigned> threads) {
  pwam::RunManifest manifest = pwam::load_manifest_file(manifest_path);
  if (threads.has_value()) manifest.threads = *threads;
  const pwam::RunResult result = pwam::run(manifest);

  std::cout << "regions+study-area records: " << result.records.size() << "\n";
  std::cout << "years: " << result.years.size();
  if (!result.years.empty()) {
    std::cout << " (" << result.years.front() << ".." << result.years.back() << ")";
  }
  std::cout << "\n";
  if (result.crossing_year.has_value()) {
    std::cout << "first year below target " << pwam::format_number(result.target) << ": "
              << *result.crossing_year << "\n";
  } else {
    std::cout << "series never drops below target "
              << pwam::format_number(result.target) << "\n";
  }
  std::cout << "outputs written to " << manifest.output_dir.string() << "\n";
  return 0;
}

int cmd_validate(const std::string& manifest_path) {
  const pwam::RunManifest manifest = pwam::load_manifest_file(manifest_path);
  const pwam::ValidationReport report = pwam::validate_run(manifest);
  std::cout << pwam::format_report(report);
  return report.ok ? 0 : 1;
}

int cmd_classify(double value, const std::vector<double>& breaks) {
  const pwam::IntervalScheme scheme = breaks.empty()
                                          ? pwam::IntervalScheme::default_scheme()
                                          : pwam::IntervalScheme::with_breaks(breaks);
  std::cout << scheme.labels[pwam::classify(value, scheme)] << "\n";
  return 0;
}

int cmd_synth(const std::string& spec_path, const std::string& out_dir) {
  pwam::synth::ScenarioSpec spec;
  if (spec_path.empty()) {
    spec = pwam::synth::default_scenario();
  } else {
    std::ifstream in(spec_path, std::ios::binary);
    if (!in) {
      pwam::raise(pwam::errc::io_failure, "cannot open spec '" + spec_path + "'");
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    spec = pwam::synth::parse_scenario_spec(buffer.str());
  }
  pwam::synth::write_scenario(spec, out_dir);
  std::cout << "scenario written to " << out_dir << " (" << spec.years << " years, "
            << spec.n_regions << " regions, seed " << spec.seed << ")\n";
  return 0;
}

int cmd_bench(const pwam::synth::BenchSpec& spec, const std::string& out_dir) {
  pwam::synth::bench_generate(spec, out_dir);
  const std::uint64_t fine_cells = static_cast<std::uint64_t>(spec.rows) * spec.cols *
                                   spec.refinement * spec.refinement;
  std::cout << "bench instance written to " << out_dir << " (" << fine_cells
            << " fine cells, " << spec.years << " years, " << spec.n_regions
            << " regions)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pwam - population-weighted annual mean PM2.5 over gridded data"};
  app.require_subcommand(1);

  auto* compute = app.add_subcommand("compute", "Run a manifest and write CSV/SVG outputs");
  std::string compute_manifest;
  unsigned compute_threads = 0;
  compute->add_option("--manifest", compute_manifest, "Path to manifest JSON")->required();
  compute->add_option("--threads", compute_threads,
                      "Override the manifest's worker count")
      ->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate", "Dry-run check of a manifest's inputs");
  std::string validate_manifest;
  validate->add_option("--manifest", validate_manifest, "Path to manifest JSON")->required();

  auto* classify = app.add_subcommand("classify", "Print the interval label for a value");
  double classify_value = 0.0;
  std::vector<double> classify_breaks;
  classify->add_option("--value", classify_value, "Concentration in µg/m³")->required();
  classify->add_option("--breaks", classify_breaks, "Comma-separated ascending breaks")
      ->delimiter(',');

  auto* version = app.add_subcommand("version", "Print the engine version");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic scenario");
  std::string synth_spec;
  std::string synth_out;
  synth->add_option("--spec", synth_spec, "Scenario spec JSON (omit for the default)");
  synth->add_option("--out", synth_out, "Output directory")->required();

  auto* bench = app.add_subcommand("bench", "Generate a large benchmark instance");
  pwam::synth::BenchSpec bench_spec;
  std::string bench_out;
  bench->add_option("--rows", bench_spec.rows, "Coarse grid rows")->required();
  bench->add_option("--cols", bench_spec.cols, "Coarse grid columns")->required();
  bench->add_option("--refine", bench_spec.refinement, "Fine cells per coarse cell side")
      ->required();
  bench->add_option("--regions", bench_spec.n_regions, "Region count")->required();
  bench->add_option("--seed", bench_spec.seed, "Generator seed")->required();
  bench->add_option("--years", bench_spec.years, "Year count (default 3)");
  bench->add_option("--disk-budget", bench_spec.disk_budget_bytes,
                    "Disk budget in bytes (default 8 GiB)");
  bench->add_option("--out", bench_out, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (compute->parsed()) {
      return cmd_compute(compute_manifest,
                         compute->count("--threads") ? std::optional<unsigned>(compute_threads)
                                                     : std::nullopt);
    }
    if (validate->parsed()) return cmd_validate(validate_manifest);
    if (classify->parsed()) return cmd_classify(classify_value, classify_breaks);
    if (version->parsed()) {
      std::cout << "pwam " << pwam::kVersion << "\n";
      return 0;
    }
    if (synth->parsed()) return cmd_synth(synth_spec, synth_out);
    if (bench->parsed()) return cmd_bench(bench_spec, bench_out);
  } catch (const pwam::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_category();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

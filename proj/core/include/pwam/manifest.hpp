#pragma once

#include <filesystem>
#include <map>
#include <string_view>
#include <vector>

namespace pwam {

// A run manifest names the inputs and parameters of one multi-year
// computation. The concentration year set defines the run's years; every
// concentration year must also have a population mapping (several years may
// share one population file).
struct RunManifest {
  std::filesystem::path regions_path;
  std::map<int, std::filesystem::path> population_paths;
  std::map<int, std::filesystem::path> concentration_paths;
  std::vector<double> breaks{35.0, 50.0, 75.0, 100.0};
  double target = 35.0;
  std::filesystem::path output_dir;
  unsigned threads = 1;
};

// Parses and validates manifest JSON. Schema errors carry a JSON pointer to
// the offending field. Paths are kept as written.
RunManifest load_manifest(std::string_view text);

// Same, but resolves relative paths against the manifest file's directory.
RunManifest load_manifest_file(const std::filesystem::path& path);

}  // namespace pwam

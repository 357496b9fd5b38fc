#include "pwam/manifest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pwam/errors.hpp"
#include "pwam/indicator.hpp"

namespace pwam {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& pointer, const std::string& what) {
  raise(errc::schema_violation, "at " + (pointer.empty() ? "/" : pointer) + ": " + what);
}

std::string require_string(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) schema_error(std::string("/") + key, "required field is missing");
  if (!it->is_string() || it->get<std::string>().empty()) {
    schema_error(std::string("/") + key, "expected a non-empty string");
  }
  return it->get<std::string>();
}

int parse_year_key(const std::string& key, const std::string& pointer) {
  int year = 0;
  const char* first = key.data();
  const char* last = key.data() + key.size();
  const auto [ptr, ec] = std::from_chars(first, last, year);
  if (ec != std::errc() || ptr != last) {
    schema_error(pointer, "year key '" + key + "' is not an integer");
  }
  return year;
}

std::map<int, std::filesystem::path> require_year_map(const json& doc, const char* key) {
  const auto it = doc.find(key);
  if (it == doc.end()) schema_error(std::string("/") + key, "required field is missing");
  if (!it->is_object()) {
    schema_error(std::string("/") + key, "expected an object mapping year to path");
  }
  std::map<int, std::filesystem::path> out;
  for (const auto& [year_key, value] : it->items()) {
    const std::string pointer = std::string("/") + key + "/" + year_key;
    const int year = parse_year_key(year_key, pointer);
    if (!value.is_string() || value.get<std::string>().empty()) {
      schema_error(pointer, "expected a non-empty path string");
    }
    out[year] = std::filesystem::path(value.get<std::string>());
  }
  return out;
}

}  // namespace

RunManifest load_manifest(std::string_view text) {
  const json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) {
    raise(errc::schema_violation, "at /: manifest is not valid JSON");
  }
  if (!doc.is_object()) {
    raise(errc::schema_violation, "at /: manifest must be a JSON object");
  }
  static const char* kKnownKeys[] = {"regions", "population",  "concentration", "breaks",
                                     "target",  "output_dir",  "threads"};
  for (const auto& [key, value] : doc.items()) {
    bool known = false;
    for (const char* k : kKnownKeys) known = known || key == k;
    if (!known) schema_error("/" + key, "unknown field");
  }

  RunManifest manifest;
  manifest.regions_path = require_string(doc, "regions");
  manifest.population_paths = require_year_map(doc, "population");
  manifest.concentration_paths = require_year_map(doc, "concentration");
  if (manifest.concentration_paths.empty()) {
    schema_error("/concentration", "at least one year is required");
  }
  for (const auto& entry : manifest.concentration_paths) {
    if (!manifest.population_paths.count(entry.first)) {
      raise(errc::missing_year_mapping, "concentration year " + std::to_string(entry.first) +
                                            " has no population mapping");
    }
  }
  manifest.output_dir = require_string(doc, "output_dir");

  if (const auto it = doc.find("breaks"); it != doc.end()) {
    if (!it->is_array() || it->empty()) {
      schema_error("/breaks", "expected a non-empty array of numbers");
    }
    std::vector<double> breaks;
    for (std::size_t i = 0; i < it->size(); ++i) {
      if (!(*it)[i].is_number()) {
        schema_error("/breaks/" + std::to_string(i), "expected a number");
      }
      breaks.push_back((*it)[i].get<double>());
    }
    IntervalScheme::with_breaks(breaks);  // throws NonAscendingBreaks when invalid
    manifest.breaks = std::move(breaks);
  }
  if (const auto it = doc.find("target"); it != doc.end()) {
    if (!it->is_number() || !std::isfinite(it->get<double>())) {
      schema_error("/target", "expected a finite number");
    }
    manifest.target = it->get<double>();
  }
  if (const auto it = doc.find("threads"); it != doc.end()) {
    if (!it->is_number_integer() || it->get<long long>() < 1) {
      schema_error("/threads", "expected a positive integer");
    }
    manifest.threads = static_cast<unsigned>(it->get<long long>());
  }
  return manifest;
}

RunManifest load_manifest_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    raise(errc::io_failure, "cannot open manifest '" + path.string() + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    raise(errc::io_failure, "read failure on manifest '" + path.string() + "'");
  }
  RunManifest manifest = load_manifest(buffer.str());

  const std::filesystem::path base = path.parent_path();
  const auto resolve = [&base](std::filesystem::path& p) {
    if (!p.is_absolute() && !base.empty()) p = base / p;
  };
  resolve(manifest.regions_path);
  for (auto& entry : manifest.population_paths) resolve(entry.second);
  for (auto& entry : manifest.concentration_paths) resolve(entry.second);
  resolve(manifest.output_dir);
  return manifest;
}

}  // namespace pwam

#include "pwam/csv.hpp"

#include <fstream>

#include "pwam/errors.hpp"
#include "pwam/text.hpp"

namespace pwam {

namespace {

constexpr const char* kNA = "NA";

std::string render_pwam(const std::optional<double>& pwam) {
  return pwam.has_value() ? format_number(*pwam) : std::string(kNA);
}

void write_csv_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    raise(errc::output_unwritable, "cannot open '" + path.string() + "' for writing");
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.flush();
  if (!out) {
    raise(errc::output_unwritable, "write failure on '" + path.string() + "'");
  }
}

}  // namespace

std::string render_study_area_timeseries(const RunResult& result) {
  std::string out = "year,pwam,total_population\n";
  for (const int year : result.years) {
    const IndicatorRecord* record = result.study_area(year);
    if (!record) continue;
    out += std::to_string(year);
    out += ',';
    out += render_pwam(record->pwam);
    out += ',';
    out += format_number(record->total_population);
    out += '\n';
  }
  return out;
}

std::string render_city_indicators(const RunResult& result) {
  std::string out = "region_id,name,year,pwam,total_population,interval_label\n";
  // Records are already ordered by (year, region order); keep that order.
  for (const IndicatorRecord& record : result.records) {
    if (record.region_id == kStudyAreaId) continue;
    out += csv_field(record.region_id);
    out += ',';
    out += csv_field(record.name);
    out += ',';
    out += std::to_string(record.year);
    out += ',';
    out += render_pwam(record.pwam);
    out += ',';
    out += format_number(record.total_population);
    out += ',';
    out += record.pwam.has_value()
               ? csv_field(result.scheme.labels[classify(record.pwam, result.scheme)])
               : std::string(kNA);
    out += '\n';
  }
  return out;
}

std::string render_interval_shares(const RunResult& result) {
  std::string out = "year";
  for (const std::string& label : result.scheme.labels) {
    out += ',';
    out += csv_field(label);
  }
  out += ",classified_population\n";
  for (const ExposureDistribution& dist : result.distributions) {
    out += std::to_string(dist.year);
    for (const double share : dist.shares) {
      out += ',';
      out += format_number(share);
    }
    out += ',';
    out += format_number(dist.classified_population);
    out += '\n';
  }
  return out;
}

std::string render_target_attainment(const RunResult& result) {
  std::string out = "year,cities_below_target,population_share_below_target\n";
  for (std::size_t i = 0; i < result.years.size(); ++i) {
    out += std::to_string(result.years[i]);
    out += ',';
    out += std::to_string(result.attainment[i].count);
    out += ',';
    out += format_number(result.attainment[i].population_share);
    out += '\n';
  }
  return out;
}

void emit_csv(const RunResult& result, const std::filesystem::path& dir) {
  write_csv_file(dir / "study_area_timeseries.csv", render_study_area_timeseries(result));
  write_csv_file(dir / "city_indicators.csv", render_city_indicators(result));
  write_csv_file(dir / "interval_shares.csv", render_interval_shares(result));
  write_csv_file(dir / "target_attainment.csv", render_target_attainment(result));
}

}  // namespace pwam

#include "pwam/charts.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <vector>

#include "pwam/errors.hpp"
#include "pwam/text.hpp"

namespace pwam {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 500.0;

// Cycled when a custom break list yields more intervals than colors.
constexpr const char* kPalette[] = {"#4575b4", "#91bfdb", "#fee090", "#fc8d59",
                                    "#d73027", "#7b3294", "#1b7837", "#636363"};
constexpr std::size_t kPaletteSize = sizeof(kPalette) / sizeof(kPalette[0]);

struct Frame {
  double left, top, right, bottom;  // plot rectangle in SVG coordinates

  double width() const { return right - left; }
  double height() const { return bottom - top; }
};

std::string num(double v) { return format_fixed(v, 2); }

// Largest of {1, 2, 5} × 10^k not exceeding what `ticks` divisions need.
double nice_step(double range, int ticks) {
  const double raw = range / ticks;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  const double base = norm <= 1.0 ? 1.0 : norm <= 2.0 ? 2.0 : norm <= 5.0 ? 5.0 : 10.0;
  return base * mag;
}

void open_svg(std::string& out) {
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"800\" "
         "height=\"500\" viewBox=\"0 0 800 500\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"800\" height=\"500\" fill=\"#ffffff\"/>\n";
}

void add_title(std::string& out, const std::string& title) {
  out += "<text x=\"" + num(kWidth / 2) +
         "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"17\" fill=\"#111111\">" +
         xml_escape(title) + "</text>\n";
}

void add_axes(std::string& out, const Frame& f) {
  out += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.top) + "\" x2=\"" + num(f.left) +
         "\" y2=\"" + num(f.bottom) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  out += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(f.bottom) + "\" x2=\"" +
         num(f.right) + "\" y2=\"" + num(f.bottom) +
         "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
}

void add_y_tick(std::string& out, const Frame& f, double y, const std::string& label) {
  out += "<line x1=\"" + num(f.left - 5) + "\" y1=\"" + num(y) + "\" x2=\"" + num(f.left) +
         "\" y2=\"" + num(y) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  out += "<line x1=\"" + num(f.left) + "\" y1=\"" + num(y) + "\" x2=\"" + num(f.right) +
         "\" y2=\"" + num(y) + "\" stroke=\"#e4e4e4\" stroke-width=\"1\"/>\n";
  out += "<text x=\"" + num(f.left - 9) + "\" y=\"" + num(y + 4) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
         "fill=\"#333333\">" +
         xml_escape(label) + "</text>\n";
}

void add_x_tick(std::string& out, const Frame& f, double x, const std::string& label) {
  out += "<line x1=\"" + num(x) + "\" y1=\"" + num(f.bottom) + "\" x2=\"" + num(x) +
         "\" y2=\"" + num(f.bottom + 5) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  out += "<text x=\"" + num(x) + "\" y=\"" + num(f.bottom + 20) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "fill=\"#333333\">" +
         xml_escape(label) + "</text>\n";
}

void add_axis_labels(std::string& out, const Frame& f, const std::string& x_label,
                     const std::string& y_label) {
  out += "<text x=\"" + num((f.left + f.right) / 2) + "\" y=\"" + num(kHeight - 14) +
         "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"14\" "
         "fill=\"#111111\">" +
         xml_escape(x_label) + "</text>\n";
  out += "<text transform=\"translate(20 " + num((f.top + f.bottom) / 2) +
         ") rotate(-90)\" text-anchor=\"middle\" font-family=\"sans-serif\" "
         "font-size=\"14\" fill=\"#111111\">" +
         xml_escape(y_label) + "</text>\n";
}

void write_svg_file(const std::filesystem::path& path, const std::string& content) {
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

std::string render_timeseries_svg(const RunResult& result) {
  const Frame f{84.0, 48.0, kWidth - 28.0, kHeight - 64.0};

  struct SeriesPoint {
    int year;
    double pwam;
  };
  std::vector<SeriesPoint> points;
  for (const int year : result.years) {
    const IndicatorRecord* record = result.study_area(year);
    if (record && record->pwam.has_value()) points.push_back({year, *record->pwam});
  }

  double year_min = result.years.empty() ? 0.0 : static_cast<double>(result.years.front());
  double year_max = result.years.empty() ? 1.0 : static_cast<double>(result.years.back());
  if (year_min == year_max) {
    year_min -= 1.0;
    year_max += 1.0;
  }
  double value_max = result.target;
  for (const SeriesPoint& p : points) value_max = std::max(value_max, p.pwam);
  value_max *= 1.08;
  if (value_max <= 0.0) value_max = 1.0;
  const double step = nice_step(value_max, 5);
  const double value_top = std::ceil(value_max / step) * step;

  const auto x_of = [&](double year) {
    return f.left + (year - year_min) / (year_max - year_min) * f.width();
  };
  const auto y_of = [&](double value) {
    return f.bottom - value / value_top * f.height();
  };

  std::string out;
  open_svg(out);
  add_title(out, "Study-area population-weighted annual mean PM2.5");
  for (double v = 0.0; v <= value_top + step * 0.5; v += step) {
    add_y_tick(out, f, y_of(v), format_number(v));
  }
  int year_span = static_cast<int>(year_max - year_min);
  const int year_step = std::max(1, (year_span + 9) / 10);
  for (int year = static_cast<int>(year_min); year <= static_cast<int>(year_max);
       year += year_step) {
    add_x_tick(out, f, x_of(year), std::to_string(year));
  }
  add_axes(out, f);

  // Dashed target reference, exactly one per document.
  const double ty = y_of(result.target);
  out += "<line class=\"reference-line\" x1=\"" + num(f.left) + "\" y1=\"" + num(ty) +
         "\" x2=\"" + num(f.right) + "\" y2=\"" + num(ty) +
         "\" stroke=\"#c0392b\" stroke-width=\"1.5\" stroke-dasharray=\"6 4\"/>\n";
  out += "<text x=\"" + num(f.right - 4) + "\" y=\"" + num(ty - 6) +
         "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
         "fill=\"#c0392b\">" +
         xml_escape("target " + format_number(result.target)) + "</text>\n";

  if (!points.empty()) {
    std::string coords;
    for (const SeriesPoint& p : points) {
      if (!coords.empty()) coords += ' ';
      coords += num(x_of(p.year)) + "," + num(y_of(p.pwam));
    }
    out += "<polyline points=\"" + coords +
           "\" fill=\"none\" stroke=\"#2c6fbb\" stroke-width=\"2\"/>\n";
    for (const SeriesPoint& p : points) {
      out += "<circle cx=\"" + num(x_of(p.year)) + "\" cy=\"" + num(y_of(p.pwam)) +
             "\" r=\"3\" fill=\"#2c6fbb\"/>\n";
    }
  }
  add_axis_labels(out, f, "year", "PWAM (µg/m³)");
  out += "</svg>\n";
  return out;
}

std::string render_shares_svg(const RunResult& result) {
  const Frame f{84.0, 96.0, kWidth - 28.0, kHeight - 64.0};
  const std::size_t nyears = result.distributions.size();
  const std::size_t nintervals = result.scheme.labels.size();

  std::string out;
  open_svg(out);
  add_title(out, "Population share by PM2.5 interval");

  // Legend row between title and plot.
  {
    double x = f.left;
    const double y = 52.0;
    for (std::size_t j = 0; j < nintervals; ++j) {
      const std::string color = kPalette[j % kPaletteSize];
      out += "<rect x=\"" + num(x) + "\" y=\"" + num(y) +
             "\" width=\"13\" height=\"13\" fill=\"" + color + "\"/>\n";
      out += "<text x=\"" + num(x + 18) + "\" y=\"" + num(y + 11) +
             "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#333333\">" +
             xml_escape(result.scheme.labels[j]) + "</text>\n";
      x += 24.0 + 9.0 * static_cast<double>(result.scheme.labels[j].size()) + 14.0;
    }
  }

  for (int pct = 0; pct <= 100; pct += 20) {
    const double y = f.bottom - (pct / 100.0) * f.height();
    add_y_tick(out, f, y, std::to_string(pct) + "%");
  }

  const double slot = nyears > 0 ? f.width() / static_cast<double>(nyears) : f.width();
  const std::size_t label_step = std::max<std::size_t>(1, (nyears + 11) / 12);
  for (std::size_t i = 0; i < nyears; ++i) {
    const double center = f.left + (static_cast<double>(i) + 0.5) * slot;
    if (i % label_step == 0) {
      add_x_tick(out, f, center, std::to_string(result.distributions[i].year));
    }
    const ExposureDistribution& dist = result.distributions[i];
    if (dist.classified_population <= 0.0) continue;
    const double bar_left = center - slot * 0.36;
    const double bar_width = slot * 0.72;
    double cumulative = 0.0;
    for (std::size_t j = 0; j < dist.shares.size(); ++j) {
      const double share = dist.shares[j];
      if (share <= 0.0) {
        continue;
      }
      const double next = cumulative + share;
      const double top = f.bottom - next * f.height();
      const double height = share * f.height();
      out += "<rect x=\"" + num(bar_left) + "\" y=\"" + num(top) + "\" width=\"" +
             num(bar_width) + "\" height=\"" + num(height) + "\" fill=\"" +
             kPalette[j % kPaletteSize] + "\"/>\n";
      cumulative = next;
    }
  }
  add_axes(out, f);
  add_axis_labels(out, f, "year", "population share");
  out += "</svg>\n";
  return out;
}

void emit_charts(const RunResult& result, const std::filesystem::path& dir) {
  write_svg_file(dir / "study_area_timeseries.svg", render_timeseries_svg(result));
  write_svg_file(dir / "interval_shares.svg", render_shares_svg(result));
}

}  // namespace pwam

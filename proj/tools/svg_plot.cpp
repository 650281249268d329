#include "svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace diffnet::experiment {
namespace {

constexpr int kWidth = 880, kHeight = 560;
constexpr int kLeft = 76, kRight = 24, kTop = 48, kBottom = 56;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void grow(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (lo > hi) {  // nothing finite to show
      lo = 0.0;
      hi = 1.0;
    }
    if (lo == hi) {
      lo -= 0.5;
      hi += 0.5;
    }
  }
};

// tick step of the form {1, 2, 5} * 10^k giving 4-8 ticks
double nice_step(double range) {
  const double raw = range / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  if (r < 1.5) return mag;
  if (r < 3.5) return 2.0 * mag;
  if (r < 7.5) return 5.0 * mag;
  return 10.0 * mag;
}

std::string trim_number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

}  // namespace

void write_line_plot(const std::string& path, const PlotSpec& spec) {
  Range xr, yr;
  for (const auto& s : spec.series) {
    if (s.x.size() != s.y.size()) {
      throw std::invalid_argument("plot: series length mismatch");
    }
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (std::isfinite(s.y[i])) {
        xr.grow(s.x[i]);
        yr.grow(s.y[i]);
      }
    }
  }
  xr.pad();
  yr.pad();

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  auto sx = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * plot_w; };
  auto sy = [&](double y) {
    return kTop + plot_h - (y - yr.lo) / (yr.hi - yr.lo) * plot_h;
  };

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("plot: cannot write " + path);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" font-family=\"sans-serif\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-size=\"16\">" << spec.title << "</text>\n";

  // grid and ticks
  const double ys = nice_step(yr.hi - yr.lo);
  for (double t = std::ceil(yr.lo / ys) * ys; t <= yr.hi + 1e-9 * ys; t += ys) {
    const double y = sy(t);
    out << "<line x1=\"" << kLeft << "\" y1=\"" << y << "\" x2=\""
        << kWidth - kRight << "\" y2=\"" << y
        << "\" stroke=\"#dddddd\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << kLeft - 8 << "\" y=\"" << y + 4
        << "\" text-anchor=\"end\" font-size=\"11\">" << trim_number(t)
        << "</text>\n";
  }
  const double xs = nice_step(xr.hi - xr.lo);
  for (double t = std::ceil(xr.lo / xs) * xs; t <= xr.hi + 1e-9 * xs; t += xs) {
    const double x = sx(t);
    out << "<line x1=\"" << x << "\" y1=\"" << kTop << "\" x2=\"" << x
        << "\" y2=\"" << kHeight - kBottom
        << "\" stroke=\"#eeeeee\" stroke-width=\"1\"/>\n";
    out << "<text x=\"" << x << "\" y=\"" << kHeight - kBottom + 18
        << "\" text-anchor=\"middle\" font-size=\"11\">" << trim_number(t)
        << "</text>\n";
  }
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h
      << "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << spec.x_label
      << "</text>\n";
  out << "<text x=\"20\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 20 "
      << kTop + plot_h / 2 << ")\">" << spec.y_label << "</text>\n";

  // series
  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    const auto& series = spec.series[s];
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    bool open = false;
    std::ostringstream points;
    auto flush = [&] {
      if (open) {
        out << "<polyline fill=\"none\" stroke=\"" << color
            << "\" stroke-width=\"1.6\" points=\"" << points.str() << "\"/>\n";
      }
      points.str("");
      open = false;
    };
    for (std::size_t i = 0; i < series.x.size(); ++i) {
      if (!std::isfinite(series.y[i]) || !std::isfinite(series.x[i])) {
        flush();
        continue;
      }
      points << sx(series.x[i]) << ',' << sy(series.y[i]) << ' ';
      open = true;
    }
    flush();
  }

  // legend, top-right corner of the plot area
  const double legend_x = kWidth - kRight - 170;
  double legend_y = kTop + 14;
  for (std::size_t s = 0; s < spec.series.size(); ++s) {
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<line x1=\"" << legend_x << "\" y1=\"" << legend_y - 4 << "\" x2=\""
        << legend_x + 26 << "\" y2=\"" << legend_y - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << legend_x + 32 << "\" y=\"" << legend_y
        << "\" font-size=\"12\">" << spec.series[s].label << "</text>\n";
    legend_y += 17;
  }
  out << "</svg>\n";
}

}  // namespace diffnet::experiment

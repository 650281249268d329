#pragma once

#include <string>
#include <vector>

namespace diffnet::experiment {

// Minimal static line plot written as an SVG file: axes with tick labels,
// one polyline per series, and a legend. Non-finite samples split the line
// into segments instead of breaking the plot.
struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

void write_line_plot(const std::string& path, const PlotSpec& spec);

}  // namespace diffnet::experiment

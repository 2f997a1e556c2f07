#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tyc {

struct PlotSeries {
  std::string label;
  std::string color;  ///< any SVG color
  std::vector<double> y;
};

/// One stacked panel sharing the x axis with the others.
struct PlotPanel {
  std::string title;
  std::string y_label;
  std::vector<PlotSeries> series;
};

/// Polyline plot with axes, ticks and a legend per panel.
void write_svg(std::ostream& out, const std::vector<double>& x, const std::vector<PlotPanel>& panels,
               const std::string& x_label = "t (months)");

}  // namespace tyc

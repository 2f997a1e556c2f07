#include "tyc/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace tyc {

namespace {

constexpr double kWidth = 720.0;
constexpr double kPanelHeight = 300.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 45.0;

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round step (1, 2 or 5 times a power of ten) giving about `target` ticks.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / mag;
  return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
}

}  // namespace

void write_svg(std::ostream& out, const std::vector<double>& x, const std::vector<PlotPanel>& panels,
               const std::string& x_label) {
  const double height = kPanelHeight * static_cast<double>(std::max<std::size_t>(panels.size(), 1));
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(kWidth) << "\" height=\"" << fmt(height)
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (x.empty()) {
    out << "</svg>\n";
    return;
  }
  const double x_min = x.front();
  const double x_max = x.back() > x.front() ? x.back() : x.front() + 1.0;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kPanelHeight - kTop - kBottom;

  for (std::size_t p = 0; p < panels.size(); ++p) {
    const PlotPanel& panel = panels[p];
    const double y0 = kPanelHeight * static_cast<double>(p);
    double lo = 0.0;
    double hi = 0.0;
    for (const auto& s : panel.series)
      for (double v : s.y)
        if (std::isfinite(v)) {
          lo = std::min(lo, v);
          hi = std::max(hi, v);
        }
    if (hi <= lo) hi = lo + 1.0;
    const double y_step = nice_step(hi - lo, 5);
    hi = std::ceil(hi / y_step) * y_step;
    lo = std::floor(lo / y_step) * y_step;

    auto px = [&](double v) { return kLeft + (v - x_min) / (x_max - x_min) * plot_w; };
    auto py = [&](double v) { return y0 + kTop + (1.0 - (v - lo) / (hi - lo)) * plot_h; };

    out << "<g>\n<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(y0 + 18)
        << "\" text-anchor=\"middle\" font-weight=\"bold\">" << escape(panel.title) << "</text>\n";
    out << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(y0 + kTop) << "\" width=\"" << fmt(plot_w)
        << "\" height=\"" << fmt(plot_h) << "\" fill=\"none\" stroke=\"black\"/>\n";
    for (double v = lo; v <= hi + 1e-9 * y_step; v += y_step) {
      out << "<line x1=\"" << fmt(kLeft - 4) << "\" y1=\"" << fmt(py(v)) << "\" x2=\"" << fmt(kLeft) << "\" y2=\""
          << fmt(py(v)) << "\" stroke=\"black\"/>";
      out << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(py(v) + 4) << "\" text-anchor=\"end\">"
          << tick_label(v) << "</text>\n";
    }
    const double x_step = nice_step(x_max - x_min, 8);
    for (double v = std::ceil(x_min / x_step) * x_step; v <= x_max + 1e-9 * x_step; v += x_step) {
      out << "<line x1=\"" << fmt(px(v)) << "\" y1=\"" << fmt(y0 + kTop + plot_h) << "\" x2=\"" << fmt(px(v))
          << "\" y2=\"" << fmt(y0 + kTop + plot_h + 4) << "\" stroke=\"black\"/>";
      out << "<text x=\"" << fmt(px(v)) << "\" y=\"" << fmt(y0 + kTop + plot_h + 16) << "\" text-anchor=\"middle\">"
          << tick_label(v) << "</text>\n";
    }
    out << "<text x=\"" << fmt(kLeft + plot_w / 2) << "\" y=\"" << fmt(y0 + kPanelHeight - 8)
        << "\" text-anchor=\"middle\">" << escape(x_label) << "</text>\n";
    out << "<text transform=\"translate(16," << fmt(y0 + kTop + plot_h / 2)
        << ") rotate(-90)\" text-anchor=\"middle\">" << escape(panel.y_label) << "</text>\n";

    for (std::size_t s = 0; s < panel.series.size(); ++s) {
      const PlotSeries& series = panel.series[s];
      // Thin long series so files stay small; the shape is unchanged at this width.
      const std::size_t n = std::min(series.y.size(), x.size());
      const std::size_t stride = std::max<std::size_t>(1, n / 1000);
      out << "<polyline fill=\"none\" stroke=\"" << escape(series.color) << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < n; i += stride) out << fmt(px(x[i])) << ',' << fmt(py(series.y[i])) << ' ';
      if (n > 0 && (n - 1) % stride != 0) out << fmt(px(x[n - 1])) << ',' << fmt(py(series.y[n - 1]));
      out << "\"/>\n";
      const double ly = y0 + kTop + 14 + 18 * static_cast<double>(s);
      out << "<line x1=\"" << fmt(kLeft + plot_w + 12) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
          << fmt(kLeft + plot_w + 32) << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << escape(series.color)
          << "\" stroke-width=\"2\"/>";
      out << "<text x=\"" << fmt(kLeft + plot_w + 38) << "\" y=\"" << fmt(ly) << "\">" << escape(series.label)
          << "</text>\n";
    }
    out << "</g>\n";
  }
  out << "</svg>\n";
}

}  // namespace tyc

#include "rcons/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace rcons::svg {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 20;
constexpr int kMarginTop = 30;
constexpr int kMarginBottom = 45;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", v);
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

bool usable(double y, bool log_y) { return std::isfinite(y) && (!log_y || y > 0.0); }

void render_panel(std::ostringstream& os, const Chart& chart, int width, int height, int y_offset) {
  const double plot_w = width - kMarginLeft - kMarginRight;
  const double plot_h = height - kMarginTop - kMarginBottom;

  double x_lo = std::numeric_limits<double>::infinity();
  double x_hi = -x_lo;
  double y_lo = x_lo;
  double y_hi = -x_lo;
  for (const auto& s : chart.series) {
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!usable(s.y[k], chart.log_y) || !std::isfinite(s.x[k])) continue;
      const double y = chart.log_y ? std::log10(s.y[k]) : s.y[k];
      x_lo = std::min(x_lo, s.x[k]);
      x_hi = std::max(x_hi, s.x[k]);
      y_lo = std::min(y_lo, y);
      y_hi = std::max(y_hi, y);
    }
  }
  if (!std::isfinite(x_lo)) {
    x_lo = 0.0;
    x_hi = 1.0;
    y_lo = 0.0;
    y_hi = 1.0;
  }
  if (chart.log_y) {
    y_lo = std::floor(y_lo);
    y_hi = std::ceil(y_hi);
  }
  if (x_hi <= x_lo) x_hi = x_lo + 1.0;
  if (y_hi <= y_lo) y_hi = y_lo + 1.0;

  auto px = [&](double x) { return kMarginLeft + (x - x_lo) / (x_hi - x_lo) * plot_w; };
  auto py = [&](double y) { return y_offset + kMarginTop + (1.0 - (y - y_lo) / (y_hi - y_lo)) * plot_h; };

  os << "<text x=\"" << width / 2 << "\" y=\"" << y_offset + 18
     << "\" text-anchor=\"middle\" font-size=\"14\">" << escape(chart.title) << "</text>\n";
  os << "<rect x=\"" << kMarginLeft << "\" y=\"" << y_offset + kMarginTop << "\" width=\"" << num(plot_w)
     << "\" height=\"" << num(plot_h) << "\" fill=\"none\" stroke=\"#000\"/>\n";

  // y ticks: decades on a log axis, five divisions otherwise.
  const int y_ticks = chart.log_y ? static_cast<int>(y_hi - y_lo) : 5;
  const int y_stride = std::max(1, y_ticks / 8);
  for (int t = 0; t <= y_ticks; t += y_stride) {
    const double yv = y_lo + (y_hi - y_lo) * t / std::max(1, y_ticks);
    const double yy = py(yv);
    os << "<line x1=\"" << kMarginLeft - 4 << "\" y1=\"" << num(yy) << "\" x2=\"" << kMarginLeft
       << "\" y2=\"" << num(yy) << "\" stroke=\"#000\"/>\n";
    const std::string label = chart.log_y ? "1e" + tick_label(yv) : tick_label(yv);
    os << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << num(yy + 4)
       << "\" text-anchor=\"end\" font-size=\"10\">" << label << "</text>\n";
  }
  for (int t = 0; t <= 5; ++t) {
    const double xv = x_lo + (x_hi - x_lo) * t / 5.0;
    const double xx = px(xv);
    const double base = y_offset + kMarginTop + plot_h;
    os << "<line x1=\"" << num(xx) << "\" y1=\"" << num(base) << "\" x2=\"" << num(xx) << "\" y2=\""
       << num(base + 4) << "\" stroke=\"#000\"/>\n";
    os << "<text x=\"" << num(xx) << "\" y=\"" << num(base + 16)
       << "\" text-anchor=\"middle\" font-size=\"10\">" << tick_label(xv) << "</text>\n";
  }
  os << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << y_offset + height - 8
     << "\" text-anchor=\"middle\" font-size=\"12\">" << escape(chart.x_label) << "</text>\n";
  const double mid_y = y_offset + kMarginTop + plot_h / 2;
  os << "<text x=\"14\" y=\"" << num(mid_y) << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 14 "
     << num(mid_y) << ")\">" << escape(chart.y_label) << "</text>\n";

  for (std::size_t si = 0; si < chart.series.size(); ++si) {
    const auto& s = chart.series[si];
    const char* color = kPalette[si % std::size(kPalette)];
    std::string points;
    auto flush = [&] {
      if (!points.empty())
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\" points=\"" << points
           << "\"/>\n";
      points.clear();
    };
    for (std::size_t k = 0; k < s.x.size() && k < s.y.size(); ++k) {
      if (!usable(s.y[k], chart.log_y) || !std::isfinite(s.x[k])) {
        flush();
        continue;
      }
      const double y = chart.log_y ? std::log10(s.y[k]) : s.y[k];
      points += num(px(s.x[k])) + "," + num(py(y)) + " ";
    }
    flush();
  }
  // Legend only for small series counts; per-node panels would drown in it.
  if (chart.series.size() <= 4) {
    for (std::size_t si = 0; si < chart.series.size(); ++si) {
      const double ly = y_offset + kMarginTop + 14 + 14.0 * si;
      os << "<text x=\"" << num(kMarginLeft + plot_w - 6) << "\" y=\"" << num(ly)
         << "\" text-anchor=\"end\" font-size=\"10\" fill=\"" << kPalette[si % std::size(kPalette)] << "\">"
         << escape(chart.series[si].label) << "</text>\n";
    }
  }
}

}  // namespace

std::string render(const std::vector<Chart>& charts, int width, int panel_height) {
  std::ostringstream os;
  const int total_height = panel_height * static_cast<int>(std::max<std::size_t>(1, charts.size()));
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << width << "\" height=\""
     << total_height << "\" font-family=\"sans-serif\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"#fff\"/>\n";
  for (std::size_t c = 0; c < charts.size(); ++c)
    render_panel(os, charts[c], width, panel_height, panel_height * static_cast<int>(c));
  os << "</svg>\n";
  return os.str();
}

}  // namespace rcons::svg

#pragma once

// Minimal static SVG 1.1 line charts.

#include <string>
#include <vector>

namespace rcons::svg {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Chart {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_y = true;
  std::vector<Series> series;
};

/// Charts stacked vertically in a single document. Non-finite points, and
/// non-positive ones on a log axis, break the polyline.
std::string render(const std::vector<Chart>& charts, int width = 720, int panel_height = 360);

}  // namespace rcons::svg

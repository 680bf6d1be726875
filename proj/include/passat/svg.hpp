#pragma once

#include <string>
#include <vector>

namespace passat {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;  // used for bound curves
};

// Self-contained SVG line plot. Log axes drop nonpositive and nonfinite
// points; a gap in valid points breaks the polyline. Deterministic output.
std::string render_line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label, const std::vector<PlotSeries>& series,
                             bool log_x, bool log_y);

}  // namespace passat

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "tailfuse/simlab.hpp"

namespace tailfuse {

struct ChartSeries {
  std::string label;
  std::vector<std::pair<double, double>> points;  // (x, y), x ascending
};

// Minimal hand-emitted SVG line chart: axes, ticks, one polyline per series
// and a legend.
void write_svg_chart(std::ostream& os, const std::string& title,
                     const std::string& x_label, const std::string& y_label,
                     const std::vector<ChartSeries>& series);

// Chart of a sweep: estimate (scaled error or power ratio) versus tau, one
// series per transform.
void write_sweep_chart(std::ostream& os, const std::vector<SimResult>& rows,
                       bool power_mode);

}  // namespace tailfuse

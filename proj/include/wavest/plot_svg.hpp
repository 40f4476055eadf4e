#pragma once

// Minimal standalone SVG line plots.

#include <string>
#include <vector>

namespace wavest {

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool dashed = false;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  int width = 640;
  int height = 420;
};

/// Non-finite points (and non-positive ones on log axes) are skipped.
std::string render_svg(const PlotSpec& spec, const std::vector<PlotSeries>& series);
void write_svg(const std::string& path, const PlotSpec& spec, const std::vector<PlotSeries>& series);

}  // namespace wavest

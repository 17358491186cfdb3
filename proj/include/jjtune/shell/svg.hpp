#pragma once

#include <string>
#include <vector>

#include "jjtune/fitkit.hpp"
#include "jjtune/trace.hpp"

namespace jjtune::shell {

struct Series {
  std::string label;
  std::vector<double> x, y;
  bool markers = false;  // points instead of a polyline
};

struct Figure {
  std::string title;
  std::string xLabel;
  std::string yLabel;
  bool logY = false;
  std::vector<Series> series;
};

// Plain SVG 1.1 text; non-finite points (and y <= 0 on a log axis) are dropped.
std::string render_svg(const Figure& fig);

Figure trace_figure(const ResistanceTrace& trace);
Figure fit_overlay_figure(const std::vector<double>& t, const std::vector<double>& y,
                          const std::vector<double>& model, const std::string& modelName);
Figure residual_figure(const std::vector<double>& t, const std::vector<double>& residuals);
Figure alpha_semilog_figure(const std::vector<double>& V, const std::vector<double>& alpha, double alpha0, double V0);

}  // namespace jjtune::shell

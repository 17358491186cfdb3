#include "jjtune/shell/svg.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace jjtune::shell {

namespace {

constexpr double kWidth = 640.0, kHeight = 420.0;
constexpr double kLeft = 78.0, kRight = 20.0, kTop = 36.0, kBottom = 54.0;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Roughly five ticks at 1/2/5 multiples.
std::vector<double> nice_ticks(double lo, double hi) {
  const double span = hi - lo;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  std::vector<double> out;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step) out.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  return out;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();

  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (!(hi >= lo)) {
      lo = 0.0;
      hi = 1.0;
    } else if (hi == lo) {
      const double d = lo == 0.0 ? 1.0 : std::abs(lo) * 0.05;
      lo -= d;
      hi += d;
    }
  }
};

}  // namespace

std::string render_svg(const Figure& fig) {
  auto ymap = [&](double y) { return fig.logY ? std::log10(y) : y; };
  auto usable = [&](double x, double y) { return std::isfinite(x) && std::isfinite(y) && (!fig.logY || y > 0.0); };

  Range xr, yr;
  for (const auto& s : fig.series)
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i)
      if (usable(s.x[i], s.y[i])) {
        xr.add(s.x[i]);
        yr.add(ymap(s.y[i]));
      }
  xr.pad();
  yr.pad();
  if (fig.logY) {
    yr.lo = std::floor(yr.lo);
    yr.hi = std::ceil(yr.hi);
    if (yr.hi == yr.lo) yr.hi += 1.0;
  }

  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double x) { return kLeft + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return kTop + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::string out;
  out += fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\" viewBox=\"0 0 {:.0f} {:.0f}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n",
      kWidth, kHeight, kWidth, kHeight);
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out += fmt::format("<text x=\"{:.1f}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", kWidth / 2,
                     escape(fig.title));
  out += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" stroke=\"black\"/>\n",
                     kLeft, kTop, pw, ph);

  for (double t : nice_ticks(xr.lo, xr.hi)) {
    const double x = px(t);
    out += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#ddd\"/>\n", x, kTop, kTop + ph);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"middle\">{:g}</text>\n", x, kTop + ph + 16, t);
  }
  const auto yticks = fig.logY ? [&] {
    std::vector<double> v;
    for (double e = yr.lo; e <= yr.hi + 1e-9; e += 1.0) v.push_back(e);
    return v;
  }() : nice_ticks(yr.lo, yr.hi);
  for (double t : yticks) {
    const double y = py(t);
    out += fmt::format("<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"#ddd\"/>\n", kLeft, y, kLeft + pw, y);
    const std::string label = fig.logY ? fmt::format("1e{:g}", t) : fmt::format("{:g}", t);
    out += fmt::format("<text x=\"{:.2f}\" y=\"{:.2f}\" text-anchor=\"end\">{}</text>\n", kLeft - 6, y + 4, label);
  }
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n", kLeft + pw / 2, kHeight - 12,
                     escape(fig.xLabel));
  out += fmt::format("<text x=\"16\" y=\"{0:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {0:.1f})\">{1}</text>\n",
                     kTop + ph / 2, escape(fig.yLabel));

  for (std::size_t k = 0; k < fig.series.size(); ++k) {
    const auto& s = fig.series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::string pts;
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!usable(s.x[i], s.y[i])) continue;
      const double x = px(s.x[i]), y = py(ymap(s.y[i]));
      if (s.markers)
        out += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"2.5\" fill=\"{}\"/>\n", x, y, color);
      else
        pts += fmt::format("{:.2f},{:.2f} ", x, y);
    }
    if (!pts.empty()) {
      pts.pop_back();
      out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", color, pts);
    }
    const double ly = kTop + 14 + 16 * static_cast<double>(k);
    out += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"10\" height=\"10\" fill=\"{}\"/>\n", kLeft + 10, ly - 9, color);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", kLeft + 26, ly, escape(s.label));
  }
  out += "</svg>\n";
  return out;
}

Figure trace_figure(const ResistanceTrace& trace) {
  Figure f{"Resistance trace", "time (s)", "resistance (Ohm)", false, {}};
  Series s;
  s.label = trace.meta.variant.empty() ? "R" : trace.meta.variant;
  for (const auto& p : trace.samples) {
    s.x.push_back(p.t);
    s.y.push_back(p.R);
  }
  f.series.push_back(std::move(s));
  return f;
}

Figure fit_overlay_figure(const std::vector<double>& t, const std::vector<double>& y,
                          const std::vector<double>& model, const std::string& modelName) {
  Figure f{"Fit overlay", "time (s)", "fractional change", false, {}};
  f.series.push_back({"data", t, y, true});
  f.series.push_back({modelName, t, model, false});
  return f;
}

Figure residual_figure(const std::vector<double>& t, const std::vector<double>& residuals) {
  Figure f{"Residuals", "time (s)", "residual", false, {}};
  f.series.push_back({"residual", t, residuals, true});
  return f;
}

Figure alpha_semilog_figure(const std::vector<double>& V, const std::vector<double>& alpha, double alpha0, double V0) {
  Figure f{"Linear rate vs amplitude", "amplitude (V)", "alpha (1/s)", true, {}};
  f.series.push_back({"measured", V, alpha, true});
  if (!V.empty()) {
    const auto [lo, hi] = std::minmax_element(V.begin(), V.end());
    Series m{"exponential fit", {}, {}, false};
    for (int i = 0; i <= 50; ++i) {
      const double v = *lo + (*hi - *lo) * i / 50.0;
      m.x.push_back(v);
      m.y.push_back(alpha0 * std::exp(v / V0));
    }
    f.series.push_back(std::move(m));
  }
  return f;
}

}  // namespace jjtune::shell

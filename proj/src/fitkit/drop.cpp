#include <algorithm>

#include "jjtune/errors.hpp"
#include "jjtune/fitkit.hpp"

namespace jjtune::fitkit {

namespace {

// Leading samples up to the end of the first manipulation phase.
std::size_t manipulation_end(const ResistanceTrace& trace) {
  std::size_t i = 0;
  for (; i < trace.samples.size(); ++i) {
    const auto p = trace.samples[i].phase;
    if (p != PhaseLabel::Idle && p != PhaseLabel::Drop && p != PhaseLabel::Active) break;
  }
  return i;
}

}  // namespace

DropSegment detect_drop(const ResistanceTrace& trace, int sustained) {
  if (sustained < 1) throw DomainError("sustained-rise length must be >= 1");
  const std::size_t n = manipulation_end(trace);
  if (n < 2) throw DomainError("trace too short for drop detection");
  const auto& s = trace.samples;
  const double R0 = s[0].R;
  const auto k = static_cast<std::size_t>(sustained);

  std::optional<std::size_t> rise;
  for (std::size_t j = 0; j + k < n; ++j) {
    bool up = true;
    for (std::size_t i = j; i < j + k && up; ++i) up = s[i + 1].R > s[i].R;
    if (up) {
      rise = j;
      break;
    }
  }

  DropSegment seg;
  if (!rise) {
    const bool allBelow = std::all_of(s.begin() + 1, s.begin() + static_cast<long>(n),
                                      [&](const TraceSample& x) { return x.R < R0; });
    if (allBelow) {
      seg.wholeTrace = true;
      seg.excludedPoints = n;
      seg.duration = s[n - 1].t - s[0].t;
      for (std::size_t i = 0; i < n; ++i) seg.depth = std::max(seg.depth, 1.0 - s[i].R / R0);
    }
    return seg;
  }
  double depth = 0.0;
  for (std::size_t i = 0; i <= *rise; ++i) depth = std::max(depth, 1.0 - s[i].R / R0);
  if (depth <= 0.0) return seg;
  seg.duration = s[*rise].t - s[0].t;
  seg.depth = depth;
  seg.excludedPoints = *rise;
  return seg;
}

ActiveSeries active_series(const ResistanceTrace& trace, int sustained) {
  ActiveSeries out;
  out.drop = detect_drop(trace, sustained);
  if (out.drop.wholeTrace) throw DomainError("trace never rises; nothing left to fit");
  const std::size_t n = manipulation_end(trace);
  const auto& s = trace.samples;
  const std::size_t first = out.drop.excludedPoints;
  for (std::size_t i = first + 1; i < n; ++i) {
    out.t.push_back(s[i].t - s[first].t);
    out.dR.push_back(s[i].R / s[first].R - 1.0);
  }
  return out;
}

FitResult fit_poly_time(const ResistanceTrace& trace, int order, int sustained) {
  const ActiveSeries a = active_series(trace, sustained);
  FitResult f = fit_poly_time(a.t, a.dR, order);
  if (a.drop.excludedPoints > 0)
    f.notes.push_back("excluded " + std::to_string(a.drop.excludedPoints) + " drop samples");
  return f;
}

}  // namespace jjtune::fitkit

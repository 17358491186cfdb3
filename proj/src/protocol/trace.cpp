#include "jjtune/errors.hpp"
#include "jjtune/trace.hpp"

namespace jjtune {

const char* to_string(PhaseLabel p) {
  switch (p) {
    case PhaseLabel::Idle: return "idle";
    case PhaseLabel::Drop: return "drop";
    case PhaseLabel::Active: return "active";
    case PhaseLabel::Relax: return "relax";
    case PhaseLabel::Probe: return "probe";
    case PhaseLabel::Failed: return "failed";
  }
  return "?";
}

PhaseLabel parse_phase_label(const std::string& s) {
  if (s == "idle") return PhaseLabel::Idle;
  if (s == "drop") return PhaseLabel::Drop;
  if (s == "active") return PhaseLabel::Active;
  if (s == "relax") return PhaseLabel::Relax;
  if (s == "probe") return PhaseLabel::Probe;
  if (s == "failed") return PhaseLabel::Failed;
  throw ValidationError("unknown phase label '" + s + "'");
}

void ResistanceTrace::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    if (i > 0 && !(s.t > samples[i - 1].t))
      throw ValidationError("trace time must be strictly increasing", static_cast<long>(i + 1));
    if (s.phase != PhaseLabel::Failed && !(s.R > 0.0))
      throw ValidationError("resistance must be positive", static_cast<long>(i + 1));
  }
}

}  // namespace jjtune

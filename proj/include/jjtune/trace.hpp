#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace jjtune {

enum class PhaseLabel { Idle, Drop, Active, Relax, Probe, Failed };

const char* to_string(PhaseLabel p);
// Throws ValidationError on an unknown label.
PhaseLabel parse_phase_label(const std::string& s);

struct TraceSample {
  double t = 0.0;      // s
  double R = 0.0;      // Ohm
  double T = 297.0;    // K
  PhaseLabel phase = PhaseLabel::Active;

  bool operator==(const TraceSample&) const = default;
};

struct TraceMeta {
  std::string variant;
  std::string programDigest;
  std::uint64_t seed = 0;
  std::map<std::string, std::string> extra;

  bool operator==(const TraceMeta&) const = default;
};

struct ResistanceTrace {
  std::vector<TraceSample> samples;
  TraceMeta meta;

  // Strictly increasing time; R > 0 for non-failed samples.
  void validate() const;
  bool failed() const { return !samples.empty() && samples.back().phase == PhaseLabel::Failed; }
};

}  // namespace jjtune

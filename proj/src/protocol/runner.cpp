#include <algorithm>
#include <cmath>

#include "jjtune/errors.hpp"
#include "jjtune/protocol.hpp"

namespace jjtune::protocol {

namespace {

void record(ResistanceTrace& trace, const twin::JunctionState& s, const Measurement& m, PhaseLabel label) {
  trace.samples.push_back({s.clock, m.R, s.T, s.phase == twin::Phase::Failed ? PhaseLabel::Failed : label});
}

bool stop_reached(const StopRule& rule, double measuredDR, int iterations) {
  if (rule.kind == StopRule::Kind::MaxIterations) return iterations >= static_cast<int>(rule.value);
  return measuredDR >= rule.value;
}

}  // namespace

PhaseLabel label_for(const twin::JunctionState& s) {
  switch (s.phase) {
    case twin::Phase::Idle: return PhaseLabel::Idle;
    case twin::Phase::Drop: return PhaseLabel::Drop;
    case twin::Phase::Active: return PhaseLabel::Active;
    case twin::Phase::Relax: return PhaseLabel::Relax;
    case twin::Phase::Failed: return PhaseLabel::Failed;
  }
  return PhaseLabel::Active;
}

std::optional<Measurement> relax_and_probe(twin::JunctionState& s, const twin::JunctionVariant& v,
                                           double duration, double tProbe, const MeasurementSpec& meas, Rng& rng,
                                           ResistanceTrace& trace, PhaseLabel label) {
  if (!(tProbe > 0.0)) throw DomainError("probe period must be positive");
  std::optional<Measurement> out;
  if (!(duration > 0.0)) return out;
  const double start = s.clock;
  const auto n = static_cast<long>(std::ceil(duration / tProbe * (1.0 - 1e-12)));
  for (long i = 1; i <= n; ++i) {
    const double next = i == n ? start + duration : start + static_cast<double>(i) * tProbe;
    twin::step_wait(s, v, next - s.clock);
    out = measure_resistance(s, meas, rng);
    record(trace, s, *out, s.phase == twin::Phase::Idle ? PhaseLabel::Probe : label);
    if (s.phase == twin::Phase::Failed) break;
  }
  return out;
}

ResistanceTrace run_program(twin::JunctionState& s, const twin::JunctionVariant& v, const Program& program,
                            Rng& rng) {
  program.validate();
  ResistanceTrace trace;
  trace.meta.variant = v.name;
  trace.meta.programDigest = program.digest();

  const Waveform wave = build_iteration(program.iteration, program.measurement);
  const double credit = wave.duration() / wave.pulse_count();

  auto last = measure_resistance(s, program.measurement, rng);
  record(trace, s, last, label_for(s));
  if (s.phase == twin::Phase::Failed) return trace;

  const int steps = program.kind == Program::Kind::Single ? 1 : program.maxSteps;
  for (int k = 1; k <= steps; ++k) {
    const StopRule rule = program.kind == Program::Kind::Single
                              ? program.stopRule
                              : StopRule::target_delta_r(k * program.stepDeltaR);
    int iterations = 0;
    int sinceMax = 0;
    double best = last.R;
    while (!stop_reached(rule, last.R / s.R0 - 1.0, iterations) &&
           iterations < program.maxIterationsPerStep && sinceMax < program.stallIterations) {
      for (const auto& seg : wave.segments) {
        if (seg.kind != Segment::Kind::Pulse) continue;
        twin::step_active(s, v, seg.V, credit, rng);
        if (s.phase == twin::Phase::Failed) {
          record(trace, s, measure_resistance(s, program.measurement, rng), PhaseLabel::Failed);
          return trace;
        }
      }
      ++iterations;
      last = measure_resistance(s, program.measurement, rng);
      record(trace, s, last, label_for(s));
      if (last.R > best) {
        best = last.R;
        sinceMax = 0;
      } else {
        ++sinceMax;
      }
    }
    twin::end_active(s, v);
    if (auto m = relax_and_probe(s, v, program.tRelax, program.tProbe, program.measurement, rng, trace)) last = *m;
    if (s.phase == twin::Phase::Failed) return trace;
  }
  return trace;
}

}  // namespace jjtune::protocol

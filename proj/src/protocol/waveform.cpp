#include <sstream>

#include "jjtune/digest.hpp"
#include "jjtune/errors.hpp"
#include "jjtune/protocol.hpp"

namespace jjtune::protocol {

void IterationSpec::validate() const {
  if (!(Va > 0.0)) throw ValidationError("pulse amplitude must be positive");
  if (M < 1) throw ValidationError("pulses per iteration must be >= 1");
  if (!(period > 0.0)) throw ValidationError("pulse period must be positive");
  if (!(blank >= 0.0)) throw ValidationError("blanking interval must be non-negative");
}

void MeasurementSpec::validate() const {
  if (!(Vmin < Vmax)) throw ValidationError("measurement sweep needs Vmin < Vmax");
  if (points < 2) throw ValidationError("measurement sweep needs >= 2 points");
  if (!(noise >= 0.0)) throw ValidationError("measurement noise must be non-negative");
  if (!(duration >= 0.0)) throw ValidationError("measurement duration must be non-negative");
}

double Waveform::duration() const {
  double t = 0.0;
  for (const auto& s : segments) t += s.duration;
  return t;
}

double Waveform::pulse_time() const {
  double t = 0.0;
  for (const auto& s : segments)
    if (s.kind == Segment::Kind::Pulse) t += s.duration;
  return t;
}

int Waveform::pulse_count() const {
  int n = 0;
  for (const auto& s : segments) n += s.kind == Segment::Kind::Pulse;
  return n;
}

Waveform build_iteration(const IterationSpec& spec, const MeasurementSpec& meas) {
  spec.validate();
  meas.validate();
  Waveform w;
  const double half = spec.period / 2.0;
  for (int i = 0; i < spec.M; ++i) {
    w.segments.push_back({Segment::Kind::Pulse, spec.Va, half});
    if (spec.blank > 0.0) w.segments.push_back({Segment::Kind::Blank, 0.0, spec.blank});
    w.segments.push_back({Segment::Kind::Pulse, -spec.Va, half});
    if (spec.blank > 0.0) w.segments.push_back({Segment::Kind::Blank, 0.0, spec.blank});
  }
  w.segments.push_back({Segment::Kind::Measure, 0.0, meas.duration});
  return w;
}

void Program::validate() const {
  iteration.validate();
  measurement.validate();
  if (kind == Kind::Stepped) {
    if (!(stepDeltaR > 0.0)) throw ValidationError("stepped programs need stepDeltaR > 0");
    if (maxSteps < 1) throw ValidationError("stepped programs need maxSteps >= 1");
  }
  if (stopRule.kind == StopRule::Kind::MaxIterations && stopRule.value < 0.0)
    throw ValidationError("iteration count must be non-negative");
  if (!(tRelax >= 0.0)) throw ValidationError("relaxation time must be non-negative");
  if (!(tProbe > 0.0)) throw ValidationError("probe period must be positive");
  if (maxIterationsPerStep < 0) throw ValidationError("iteration guard must be non-negative");
  if (stallIterations < 1) throw ValidationError("stall guard must be >= 1");
}

std::string Program::canonical() const {
  std::ostringstream os;
  os.precision(17);
  os << (kind == Kind::Single ? "single" : "stepped") << ";Va=" << iteration.Va << ";M=" << iteration.M
     << ";period=" << iteration.period << ";blank=" << iteration.blank << ";Vmin=" << measurement.Vmin
     << ";Vmax=" << measurement.Vmax << ";points=" << measurement.points << ";noise=" << measurement.noise
     << ";meas=" << measurement.duration << ";stop="
     << (stopRule.kind == StopRule::Kind::MaxIterations ? "iterations:" : "target:") << stopRule.value
     << ";step=" << stepDeltaR << ";tRelax=" << tRelax << ";tProbe=" << tProbe << ";maxSteps=" << maxSteps
     << ";guard=" << maxIterationsPerStep << ";stall=" << stallIterations;
  return os.str();
}

std::string Program::digest() const { return hex64(fnv1a(canonical())); }

Program build_single_program(const IterationSpec& iteration, StopRule stop, double tRelax, double tProbe) {
  Program p;
  p.kind = Program::Kind::Single;
  p.iteration = iteration;
  p.stopRule = stop;
  p.tRelax = tRelax;
  p.tProbe = tProbe;
  p.maxSteps = 1;
  p.validate();
  return p;
}

Program build_stepped_program(double stepDeltaR, double tRelax, int maxSteps, const IterationSpec& iteration,
                              double tProbe) {
  if (!(stepDeltaR > 0.0)) throw ValidationError("stepDeltaR must be positive");
  if (maxSteps == 1) return build_single_program(iteration, StopRule::target_delta_r(stepDeltaR), tRelax, tProbe);
  Program p;
  p.kind = Program::Kind::Stepped;
  p.iteration = iteration;
  p.stopRule = StopRule::target_delta_r(stepDeltaR);
  p.stepDeltaR = stepDeltaR;
  p.tRelax = tRelax;
  p.tProbe = tProbe;
  p.maxSteps = maxSteps;
  p.validate();
  return p;
}

}  // namespace jjtune::protocol

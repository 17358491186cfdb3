#pragma once

#include <optional>
#include <string>
#include <vector>

#include "jjtune/rng.hpp"
#include "jjtune/trace.hpp"
#include "jjtune/twin.hpp"

namespace jjtune::protocol {

struct IterationSpec {
  double Va = 0.85;     // V
  int M = 6;            // bipolar pulses per iteration
  double period = 0.2;  // s
  double blank = 0.1;   // s

  void validate() const;
};

struct MeasurementSpec {
  double Vmin = -0.013;
  double Vmax = 0.013;
  int points = 27;
  double noise = 1e-4;  // relative current noise, 1 sigma
  double duration = 0.5;

  void validate() const;
};

struct Segment {
  enum class Kind { Pulse, Blank, Measure };
  Kind kind = Kind::Pulse;
  double V = 0.0;
  double duration = 0.0;
};

struct Waveform {
  std::vector<Segment> segments;

  double duration() const;
  double pulse_time() const;
  int pulse_count() const;
};

// (+Va, blank, -Va, blank) x M, then one measurement slot.
Waveform build_iteration(const IterationSpec& spec, const MeasurementSpec& meas = {});

struct StopRule {
  enum class Kind { MaxIterations, TargetDeltaR };
  Kind kind = Kind::MaxIterations;
  double value = 0.0;

  static StopRule max_iterations(int n) { return {Kind::MaxIterations, static_cast<double>(n)}; }
  static StopRule target_delta_r(double fraction) { return {Kind::TargetDeltaR, fraction}; }
};

struct Program {
  enum class Kind { Single, Stepped };
  Kind kind = Kind::Single;
  IterationSpec iteration;
  MeasurementSpec measurement;
  StopRule stopRule = StopRule::max_iterations(0);
  double stepDeltaR = 0.10;
  double tRelax = 10800.0;
  double tProbe = 60.0;
  int maxSteps = 1;
  // Guards against stop targets the junction cannot reach: a step also ends
  // after this many iterations without a new resistance maximum.
  int maxIterationsPerStep = 20000;
  int stallIterations = 50;

  void validate() const;
  // Stable text form; its digest tags traces.
  std::string canonical() const;
  std::string digest() const;
};

Program build_single_program(const IterationSpec& iteration, StopRule stop, double tRelax, double tProbe = 60.0);
Program build_stepped_program(double stepDeltaR, double tRelax, int maxSteps, const IterationSpec& iteration,
                              double tProbe = 60.0);

struct Measurement {
  double R = 0.0;
  double r2 = 0.0;
  bool shorted = false;
};

Measurement measure_resistance(const twin::JunctionState& s, const MeasurementSpec& spec, Rng& rng);

PhaseLabel label_for(const twin::JunctionState& s);

// Waits `duration` on the junction, measuring every tProbe and once at the
// end. Returns the final measurement, if any was taken.
std::optional<Measurement> relax_and_probe(twin::JunctionState& s, const twin::JunctionVariant& v,
                                           double duration, double tProbe, const MeasurementSpec& meas, Rng& rng,
                                           ResistanceTrace& trace, PhaseLabel label = PhaseLabel::Relax);

// Runs the program on an existing state. The first sample is a measurement
// at the state's current clock.
ResistanceTrace run_program(twin::JunctionState& s, const twin::JunctionVariant& v, const Program& program,
                            Rng& rng);

}  // namespace jjtune::protocol

#pragma once

#include <string>
#include <vector>

#include "jjtune/errors.hpp"
#include "jjtune/physics.hpp"
#include "jjtune/protocol.hpp"
#include "jjtune/twin.hpp"

namespace jjtune::planner {

using units::ElectronVolts;
using units::Hertz;
using units::Ohms;

struct TuningTarget {
  Hertz fTarget;
  Hertz EC;
  ElectronVolts gap{174.3e-6};
  double ratio = 1.1385;
  Hertz tolerance{1e6};

  void validate() const;
  physics::ConversionParams conversion() const;
};

struct UncertaintyBudget {
  double offsetSigma = 0.0019;
  double slopeSigma = 0.01;
  Hertz fSigma{0.0};
};

struct PlannedStep {
  double Va = 0.0;           // V
  double activeDR = 0.0;     // planned active increment of this step
  double stopTotalDR = 0.0;  // measured cumulative change at which to stop
  double tRelax = 0.0;       // s
  double duration = 0.0;     // predicted active time, s
  bool extended = false;     // needed more than the time budget
};

struct TuningPlan {
  std::vector<PlannedStep> steps;
  double predictedTotalDR = 0.0;
  double predictedActiveDR = 0.0;
  Hertz predictedF;
  UncertaintyBudget budget;
  double safetyMargin = 0.0;  // Vbreak - max Va
  double horizon = 0.0;       // settling time after the last stop, s
  std::string calibration;    // variant the laws were taken from
  std::vector<std::string> warnings;
};

struct PlannerOptions {
  double timeBudget = 600.0;
  double margin = 0.1;
  double maxDuration = 3600.0;
  double minVa = 0.05;
  double horizon = 1800.0;
  double maxCumulativeDR = 2.7;
  int maxSteps = 60;
  UncertaintyBudget budget;
};

// Plans that cannot be completed; carries whatever was planned.
class InfeasiblePlan : public InfeasibleError {
 public:
  InfeasiblePlan(const std::string& what, TuningPlan partial)
      : InfeasibleError(what), partial_(std::move(partial)) {}
  const TuningPlan& partial() const noexcept { return partial_; }

 private:
  TuningPlan partial_;
};

double required_total_dr(Ohms R0, const TuningTarget& target);

struct ActiveSplit {
  double dRactive = 0.0;
  bool relaxationOvershoots = false;
};

ActiveSplit split_active_target(double dRtotal, double slope, double offset);

struct AmplitudeChoice {
  double Va = 0.0;
  double duration = 0.0;
  bool extended = false;
  bool noop = false;
};

// Largest increment max_{t <= T} (alpha t + beta t^2) at amplitude V.
double achievable_active_dr(const twin::JunctionVariant& v, double V, double T);

AmplitudeChoice choose_amplitude(const twin::JunctionVariant& v, double dRactive, double timeBudget, double margin,
                                 double maxDuration = 3600.0, double minVa = 0.05);

TuningPlan plan_steps(Ohms R0, const TuningTarget& target, const twin::JunctionVariant& v, double stepDeltaR,
                      double tRelax, const PlannerOptions& opt = {});

// Plans from an arbitrary twin state; targets are relative to state.R0.
TuningPlan plan_from_state(const twin::JunctionState& state, const TuningTarget& target,
                           const twin::JunctionVariant& v, double stepDeltaR, double tRelax,
                           const PlannerOptions& opt = {});

Hertz predict_frequency_uncertainty(TuningPlan& plan, Ohms R0, const TuningTarget& target);

struct ClosedLoopOptions {
  PlannerOptions planner;
  protocol::IterationSpec iteration;
  protocol::MeasurementSpec measurement;
  double stepDeltaR = 0.10;
  double tRelax = 10800.0;
  double tProbe = 60.0;
  bool replan = true;
};

struct ClosedLoopOutcome {
  bool failed = false;
  int stepsRun = 0;
  double achievedTotalDR = 0.0;
  Hertz achievedF;
  Hertz targetF;
  Hertz residual;  // achieved - target
  TuningPlan initialPlan;
  ResistanceTrace trace;
  std::vector<std::string> events;
};

// `belief` is what the planner assumes; `truth` drives the twin.
ClosedLoopOutcome closed_loop_execute(twin::JunctionState& state, const twin::JunctionVariant& truth,
                                      const twin::JunctionVariant& belief, const TuningTarget& target,
                                      const ClosedLoopOptions& opt, Rng& rng);

}  // namespace jjtune::planner

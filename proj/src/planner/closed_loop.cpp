#include "jjtune/planner.hpp"

namespace jjtune::planner {

namespace {

void append(ResistanceTrace& into, const ResistanceTrace& part) {
  for (const auto& s : part.samples)
    if (into.samples.empty() || s.t > into.samples.back().t) into.samples.push_back(s);
}

}  // namespace

ClosedLoopOutcome closed_loop_execute(twin::JunctionState& state, const twin::JunctionVariant& truth,
                                      const twin::JunctionVariant& belief, const TuningTarget& target,
                                      const ClosedLoopOptions& opt, Rng& rng) {
  ClosedLoopOutcome out;
  out.targetF = target.fTarget;
  out.trace.meta.variant = truth.name;

  TuningPlan plan = plan_from_state(state, target, belief, opt.stepDeltaR, opt.tRelax, opt.planner);
  out.initialPlan = plan;

  std::size_t idx = 0;
  bool settled = false;
  while (idx < plan.steps.size()) {
    const PlannedStep& step = plan.steps[idx];
    protocol::IterationSpec it = opt.iteration;
    it.Va = step.Va;
    auto program = protocol::build_single_program(it, protocol::StopRule::target_delta_r(step.stopTotalDR),
                                                  step.tRelax, opt.tProbe);
    program.measurement = opt.measurement;
    append(out.trace, protocol::run_program(state, truth, program, rng));
    ++out.stepsRun;
    if (state.phase == twin::Phase::Failed) {
      out.failed = true;
      out.events.push_back("junction failed during step " + std::to_string(out.stepsRun));
      break;
    }
    const bool last = idx + 1 == plan.steps.size();
    if (last) {
      settled = true;
      break;
    }
    if (opt.replan) {
      plan = plan_from_state(state, target, belief, opt.stepDeltaR, opt.tRelax, opt.planner);
      out.events.push_back("re-planned after step " + std::to_string(out.stepsRun) + ": " +
                           std::to_string(plan.steps.size()) + " steps left");
      idx = 0;
    } else {
      ++idx;
    }
  }

  if (!out.failed && !settled) {
    // Nothing (left) to pulse: let the junction settle for the planning horizon.
    if (out.trace.samples.empty()) {
      const auto m = protocol::measure_resistance(state, opt.measurement, rng);
      out.trace.samples.push_back({state.clock, m.R, state.T, protocol::label_for(state)});
    }
    protocol::relax_and_probe(state, truth, opt.planner.horizon, opt.tProbe, opt.measurement, rng, out.trace);
  }

  const double R = out.trace.samples.empty() ? state.R : out.trace.samples.back().R;
  out.achievedTotalDR = R / state.R0 - 1.0;
  out.achievedF = physics::f01_from_resistance(units::Ohms(R), target.EC, target.conversion());
  out.residual = out.achievedF - out.targetF;
  return out;
}

}  // namespace jjtune::planner

#include <algorithm>
#include <cmath>

#include "jjtune/planner.hpp"

namespace jjtune::planner {

namespace {

constexpr double kChunk = 5.0;  // s, predictor integration chunk
constexpr double kHeadroom = 1.05;
// Round-off of the frequency to resistance inversion.
constexpr double kDemandSlack = 1e-6;

twin::JunctionVariant predictor_variant(const twin::JunctionVariant& v) {
  twin::JunctionVariant p = v;
  p.hazard = {};
  p.dropModel.depth0 = 0.0;
  return p;
}

// Smallest t with alpha t + beta t^2 = dR, or +inf.
double time_to(double alpha, double beta, double dR) {
  const double disc = alpha * alpha + 4.0 * beta * dR;
  if (disc < 0.0) return std::numeric_limits<double>::infinity();
  const double den = alpha + std::sqrt(disc);
  return den > 0.0 ? 2.0 * dR / den : std::numeric_limits<double>::infinity();
}

// Runs the active phase until the total change reaches x exactly.
bool run_to(twin::JunctionState& s, const twin::JunctionVariant& v, double Va, double x, double maxActive) {
  Rng rng(0);
  if (twin::total_delta_r(s) >= x) return true;
  while (true) {
    const twin::JunctionState before = s;
    twin::step_active(s, v, Va, kChunk, rng);
    if (twin::total_delta_r(s) >= x) {
      double lo = 0.0, hi = kChunk;
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        twin::JunctionState probe = before;
        twin::step_active(probe, v, Va, mid, rng);
        (twin::total_delta_r(probe) >= x ? hi : lo) = mid;
      }
      s = before;
      twin::step_active(s, v, Va, hi, rng);
      return true;
    }
    if (s.stepTime > maxActive) return false;
  }
}

struct Predictor {
  const twin::JunctionVariant& v;
  const PlannerOptions& opt;
  double tRelax;

  double max_active() const { return 2.0 * opt.maxDuration + 60.0; }

  // Stop at x, relax `wait`, then report the change after a further horizon.
  double after(const twin::JunctionState& from, double Va, double x, double wait, bool horizon = true) const {
    twin::JunctionState s = from;
    if (!run_to(s, v, Va, x, max_active())) throw InfeasibleError("predicted step does not reach its stop target");
    twin::end_active(s, v);
    twin::step_wait(s, v, wait + (horizon ? opt.horizon : 0.0));
    return twin::total_delta_r(s);
  }

  double idle(const twin::JunctionState& from, double wait) const {
    twin::JunctionState s = from;
    twin::step_wait(s, v, wait + opt.horizon);
    return twin::total_delta_r(s);
  }
};

// Bisection for g(x) = goal on [lo, hi] with g increasing.
template <class G>
double solve_increasing(G g, double goal, double lo, double hi) {
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) >= goal ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

void TuningTarget::validate() const {
  if (!(fTarget.value() > 0.0)) throw DomainError("target frequency must be positive");
  if (!(tolerance.value() > 0.0)) throw DomainError("frequency tolerance must be positive");
  if (!(EC.value() > 0.0)) throw DomainError("EC must be positive");
  conversion().validate();
}

physics::ConversionParams TuningTarget::conversion() const {
  physics::ConversionParams c;
  c.gap = gap;
  c.ratio = ratio;
  return c;
}

double required_total_dr(Ohms R0, const TuningTarget& target) {
  target.validate();
  const auto conv = target.conversion();
  const double f0 = physics::f01_from_resistance(R0, target.EC, conv).value();
  const double ft = target.fTarget.value();
  if (ft > f0) throw InfeasibleError("target frequency lies above the current frequency; resistance only increases");
  if (ft == f0) return 0.0;
  double lo = R0.value();
  double hi = 2.0 * lo;
  while (physics::f01_from_resistance(Ohms(hi), target.EC, conv).value() > ft) {
    hi *= 2.0;
    if (hi > 1e4 * R0.value()) throw InfeasibleError("target frequency out of reach");
  }
  for (int i = 0; i < 200 && hi - lo > 1e-13 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    (physics::f01_from_resistance(Ohms(mid), target.EC, conv).value() > ft ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi) / R0.value() - 1.0;
}

ActiveSplit split_active_target(double dRtotal, double slope, double offset) {
  if (!(slope >= 1.0)) throw DomainError("relaxation slope must be >= 1");
  if (dRtotal < offset) return {0.0, true};
  return {(dRtotal - offset) / slope, false};
}

double achievable_active_dr(const twin::JunctionVariant& v, double V, double T) {
  const double a = twin::alpha_of_v(v, V);
  const double b = twin::beta_of_v(v, V);
  double t = T;
  if (b < 0.0) t = std::min(T, a / (-2.0 * b));
  return a * t + b * t * t;
}

AmplitudeChoice choose_amplitude(const twin::JunctionVariant& v, double dRactive, double timeBudget, double margin,
                                 double maxDuration, double minVa) {
  if (!(dRactive >= 0.0)) throw DomainError("active target must be non-negative");
  if (!(timeBudget > 0.0)) throw DomainError("time budget must be positive");
  if (!(margin >= 0.0)) throw DomainError("voltage margin must be non-negative");
  AmplitudeChoice c;
  if (dRactive == 0.0) {
    c.noop = true;
    return c;
  }
  const double vmax = v.Vbreak - margin;
  if (vmax < minVa) throw InfeasibleError("voltage margin leaves no usable amplitude");

  auto reach = [&](double V, double T) { return achievable_active_dr(v, V, T); };
  constexpr double kGrid = 1e-3;
  const int n = static_cast<int>(std::floor((vmax - minVa) / kGrid + 1e-9));
  for (int k = 0; k <= n + 1; ++k) {
    const double V = std::min(minVa + k * kGrid, vmax);
    if (reach(V, timeBudget) < dRactive) {
      if (V >= vmax) break;
      continue;
    }
    double hi = V;
    if (k > 0) {
      double lo = std::min(minVa + (k - 1) * kGrid, vmax);
      for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (reach(mid, timeBudget) >= dRactive ? hi : lo) = mid;
      }
    }
    c.Va = hi;
    c.duration = std::min(timeBudget, time_to(twin::alpha_of_v(v, hi), twin::beta_of_v(v, hi), dRactive));
    return c;
  }
  if (reach(vmax, maxDuration) >= dRactive) {
    c.Va = vmax;
    c.duration = time_to(twin::alpha_of_v(v, vmax), twin::beta_of_v(v, vmax), dRactive);
    c.extended = true;
    return c;
  }
  throw InfeasibleError("active increment unreachable below Vbreak - margin within the maximum duration");
}

Hertz predict_frequency_uncertainty(TuningPlan& plan, Ohms R0, const TuningTarget& target) {
  const auto& b = plan.budget;
  const double dR = R0.value() * std::hypot(b.offsetSigma, b.slopeSigma * plan.predictedActiveDR);
  const Ohms R = R0 * (1.0 + plan.predictedTotalDR);
  if (dR == 0.0) {
    plan.budget.fSigma = Hertz(0.0);
    return plan.budget.fSigma;
  }
  const auto bound = physics::frequency_precision_bound(R, dR / R.value(), target.EC, target.conversion());
  plan.budget.fSigma = bound.width;
  return plan.budget.fSigma;
}

TuningPlan plan_from_state(const twin::JunctionState& state, const TuningTarget& target,
                           const twin::JunctionVariant& v, double stepDeltaR, double tRelax,
                           const PlannerOptions& opt) {
  if (!(stepDeltaR > 0.0)) throw DomainError("step size must be positive");
  if (!(tRelax >= 0.0)) throw DomainError("relaxation time must be non-negative");
  if (state.phase == twin::Phase::Failed) throw DomainError("cannot plan for a failed junction");

  const Ohms R0(state.R0);
  const double demand = required_total_dr(R0, target);
  const double goal = std::min(demand, opt.maxCumulativeDR);
  const twin::JunctionVariant pv = predictor_variant(v);
  const Predictor pred{pv, opt, tRelax};
  // Any step adds at least the offset law's value at the horizon, so an
  // intermediate stop must leave more than that for the final step.
  const double minFinal = pv.relaxLaw.offset(opt.horizon) + 0.1 * stepDeltaR;

  TuningPlan plan;
  plan.calibration = v.name;
  plan.horizon = opt.horizon;
  plan.budget = opt.budget;

  twin::JunctionState sim = state;
  twin::end_active(sim, pv);
  // The cached relaxation is re-evaluated under the planner's laws; the
  // mismatch with the observed change is kept as a static offset.
  const double observed = twin::total_delta_r(sim);
  sim.relaxOffset = twin::relaxation_fraction(sim, pv);
  sim.dropOffset += observed - twin::total_delta_r(sim);
  const double base = twin::total_delta_r(sim);

  auto finish = [&](double total) {
    plan.predictedTotalDR = total;
    plan.predictedActiveDR = 0.0;
    for (const auto& st : plan.steps) plan.predictedActiveDR += st.activeDR;
    plan.predictedF = physics::f01_from_resistance(R0 * (1.0 + total), target.EC, target.conversion());
    double vmax = 0.0;
    for (const auto& s : plan.steps) vmax = std::max(vmax, s.Va);
    plan.safetyMargin = v.Vbreak - vmax;
    predict_frequency_uncertainty(plan, R0, target);
  };
  // Amplitudes are sized with headroom over the increment and the expected
  // drop, so the stop target is met on the rising part of the growth curve.
  auto amplitude = [&](double inc) {
    const double drop = v.dropModel.depth0 * (1.0 + v.dropModel.growth * std::max(0.0, twin::total_delta_r(sim)));
    try {
      return choose_amplitude(pv, kHeadroom * inc + drop, opt.timeBudget, opt.margin, opt.maxDuration, opt.minVa);
    } catch (const InfeasibleError& e) {
      finish(twin::total_delta_r(state));
      throw InfeasiblePlan(e.what(), plan);
    }
  };


  // Intermediate steps put the value settled after tRelax on the grid
  // base + k stepDeltaR; the final step lands on the goal after the horizon.
  double k = 1.0;
  while (true) {
    const double s = twin::total_delta_r(sim);
    const double none = pred.idle(sim, 0.0);
    if (none >= goal) {
      if (none - goal > 1e-4) plan.warnings.push_back("relaxation alone overshoots the demand");
      finish(none);
      break;
    }
    if (static_cast<int>(plan.steps.size()) >= opt.maxSteps) {
      finish(s);
      throw InfeasiblePlan("demand exceeds the step count the planner allows", plan);
    }

    // Outcome of stopping this step at x, with the amplitude sized for x.
    auto outcome = [&](double x, double wait, bool horizon) {
      return pred.after(sim, amplitude(x - s).Va, x, wait, horizon);
    };
    const double idleSettled = outcome(s, tRelax, false);
    while (base + k * stepDeltaR <= idleSettled) k += 1.0;
    const double c = base + k * stepDeltaR;

    if (c > goal - minFinal) {
      // Any pulse opens a relaxation entry, so the smallest step is not x = s.
      constexpr double kTiny = 1e-9;
      const double smallest = outcome(s + kTiny, 0.0, true);
      if (smallest > goal) {
        plan.warnings.push_back("demand falls between waiting and the smallest possible step");
        if (smallest - goal < goal - none) {
          const auto a = amplitude(kTiny);
          plan.steps.push_back({a.Va, kTiny, s + kTiny, opt.horizon, a.duration, false});
          finish(smallest);
        } else {
          finish(none);
        }
        break;
      }
      const double x = solve_increasing([&](double y) { return outcome(y, 0.0, true); }, goal, s, goal);
      const auto a = amplitude(x - s);
      plan.steps.push_back({a.Va, x - s, x, opt.horizon, a.duration, a.extended});
      finish(pred.after(sim, a.Va, x, 0.0));
      break;
    }

    const double x = solve_increasing([&](double y) { return outcome(y, tRelax, false); }, c, s, c);
    const auto a = amplitude(x - s);
    plan.steps.push_back({a.Va, x - s, x, tRelax, a.duration, a.extended});
    if (!run_to(sim, pv, a.Va, x, pred.max_active())) {
      finish(s);
      throw InfeasiblePlan("predicted step does not reach its stop target", plan);
    }
    twin::end_active(sim, pv);
    twin::step_wait(sim, pv, tRelax);
    k += 1.0;
  }

  if (demand > opt.maxCumulativeDR + kDemandSlack)
    throw InfeasiblePlan("demand exceeds the configured maximum cumulative change", plan);
  return plan;
}

TuningPlan plan_steps(Ohms R0, const TuningTarget& target, const twin::JunctionVariant& v, double stepDeltaR,
                      double tRelax, const PlannerOptions& opt) {
  const twin::JunctionState s = twin::make_state(v, R0.value());
  return plan_from_state(s, target, v, stepDeltaR, tRelax, opt);
}

}  // namespace jjtune::planner

#include <algorithm>
#include <cmath>

#include "jjtune/errors.hpp"
#include "jjtune/twin.hpp"

namespace jjtune::twin {

namespace {

bool warm(const JunctionState& s, const JunctionVariant& v) { return s.T > v.relaxLaw.Tfreeze; }

void fail(JunctionState& s, const JunctionVariant& v, Rng& rng) {
  s.phase = Phase::Failed;
  s.R = v.RshortMax * (0.5 + 0.5 * rng.uniform());
}

void refresh(JunctionState& s, const JunctionVariant& v) {
  if (s.phase == Phase::Failed) return;
  s.relaxOffset = relaxation_fraction(s, v);
  const double rt = resistance_rt(s);
  if (rt <= v.RshortMax) {
    s.phase = Phase::Failed;
    s.R = rt;
    return;
  }
  s.R = s.T < v.simmons.Tref.value()
            ? rt * physics::cryogenic_resistance_factor(units::Kelvin(s.T), v.simmons)
            : rt;
}

void check_dt(double dt) {
  if (!(dt >= 0.0)) throw DomainError("time step must be non-negative");
}

void advance_entries(JunctionState& s, const JunctionVariant& v, double dt) {
  if (!warm(s, v)) return;
  for (auto& e : s.relaxLedger) e.warmAge += dt;
}

// Integral of the hazard rate over step-time [t0, t1].
double hazard_integral(const FailureModel& h, double t0, double t1) {
  const double w = h.earlyWindow;
  const double early = std::max(0.0, std::min(t1, w) - std::min(t0, w));
  return h.earlyRate * early + h.lateRate * ((t1 - t0) - early);
}

}  // namespace

const char* to_string(Phase p) {
  switch (p) {
    case Phase::Idle: return "idle";
    case Phase::Drop: return "drop";
    case Phase::Active: return "active";
    case Phase::Relax: return "relax";
    case Phase::Failed: return "failed";
  }
  return "?";
}

JunctionState make_state(const JunctionVariant& v, std::optional<double> R0, double T) {
  v.validate();
  JunctionState s;
  s.R0 = R0.value_or(v.RW);
  if (!(s.R0 > v.RshortMax)) throw DomainError("R0 must exceed the short-circuit ceiling");
  if (!(T >= 0.0)) throw DomainError("temperature must be non-negative");
  s.T = T;
  refresh(s, v);
  return s;
}

double relaxation_fraction(const JunctionState& s, const JunctionVariant& v) {
  double sum = 0.0;
  for (const auto& e : s.relaxLedger)
    sum += (v.relaxLaw.slope(e.warmAge) - 1.0) * e.increment + v.relaxLaw.offset(e.warmAge);
  return sum;
}

double total_delta_r(const JunctionState& s) {
  return s.dRactive + s.dropOffset + s.relaxOffset + s.ageOffset;
}

double resistance_rt(const JunctionState& s) { return s.R0 * (1.0 + total_delta_r(s)); }

void step_active(JunctionState& s, const JunctionVariant& v, double V, double dt, Rng& rng) {
  check_dt(dt);
  if (s.phase == Phase::Failed) throw DomainError("junction has failed");
  if (dt == 0.0) return;
  const double absV = std::abs(V);
  if (absV >= v.Vbreak) {
    s.clock += dt;
    fail(s, v, rng);
    return;
  }

  if (s.phase != Phase::Drop && s.phase != Phase::Active) {
    s.stepTime = 0.0;
    s.stepGrowth = 0.0;
    s.stepDropApplied = 0.0;
    s.stepDropDepth = v.dropModel.depth0 * (1.0 + v.dropModel.growth * std::max(0.0, total_delta_r(s)));
  }

  const double alpha = alpha_of_v(v, absV);
  const double beta = beta_of_v(v, absV);
  const double dur = s.stepDropDepth > 0.0 ? v.dropModel.duration0 : 0.0;
  const double t0 = s.stepTime;

  if (dur == 0.0 && s.stepDropApplied < s.stepDropDepth) {
    s.dropOffset -= s.stepDropDepth - s.stepDropApplied;
    s.stepDropApplied = s.stepDropDepth;
  }

  double rem = dt;
  if (s.stepTime < dur) {
    const double piece = std::min(rem, dur - s.stepTime);
    const double d = s.stepDropDepth * piece / dur;
    s.dropOffset -= d;
    s.stepDropApplied += d;
    s.stepTime += piece;
    rem -= piece;
  }
  if (rem > 0.0) {
    const double ta = s.stepTime - dur;
    const double inc = alpha * rem + beta * (2.0 * ta * rem + rem * rem);
    s.stepGrowth += inc;
    s.dRactive = std::max(0.0, s.dRactive + inc);
    s.stepTime += rem;
  }

  advance_entries(s, v, dt);
  s.phase = s.stepTime < dur ? Phase::Drop : Phase::Active;
  s.clock += dt;

  const double H = hazard_integral(v.hazard, t0, s.stepTime);
  if (H > 0.0 && rng.uniform() < -std::expm1(-H)) {
    fail(s, v, rng);
    return;
  }
  refresh(s, v);
}

void end_active(JunctionState& s, const JunctionVariant& v) {
  if (s.phase != Phase::Drop && s.phase != Phase::Active) return;
  RelaxEntry e;
  e.stopTime = s.clock;
  e.dRactiveAtStop = s.dRactive;
  e.increment = std::max(0.0, s.stepGrowth - s.stepDropApplied);
  s.relaxLedger.push_back(e);
  ++s.stepIndex;
  s.phase = Phase::Relax;
  s.stepTime = s.stepGrowth = s.stepDropDepth = s.stepDropApplied = 0.0;
  refresh(s, v);
}

void step_relax(JunctionState& s, const JunctionVariant& v, double dt) {
  check_dt(dt);
  if (s.phase == Phase::Failed) {
    s.clock += dt;
    return;
  }
  if (s.relaxLedger.empty()) throw DomainError("relaxation needs a completed manipulation step");
  if (s.phase == Phase::Drop || s.phase == Phase::Active) throw DomainError("active step still open");
  if (dt == 0.0) return;
  advance_entries(s, v, dt);
  s.phase = Phase::Relax;
  s.clock += dt;
  refresh(s, v);
}

void step_age(JunctionState& s, const JunctionVariant& v, double dt) {
  check_dt(dt);
  if (s.phase == Phase::Failed) {
    s.clock += dt;
    return;
  }
  if (s.phase != Phase::Idle) throw DomainError("aging applies to idle junctions");
  if (dt == 0.0) return;
  if (warm(s, v)) {
    s.ageClock += dt;
    s.ageOffset = v.aging_coefficient() * std::log1p(s.ageClock / v.aging.tau);
  }
  s.clock += dt;
  refresh(s, v);
}

void step_wait(JunctionState& s, const JunctionVariant& v, double dt) {
  if (s.phase == Phase::Idle && s.relaxLedger.empty()) step_age(s, v, dt);
  else step_relax(s, v, dt);
}

void apply_temperature(JunctionState& s, const JunctionVariant& v, double T) {
  if (!(T >= 0.0)) throw DomainError("temperature must be non-negative");
  s.T = T;
  refresh(s, v);
}

Breakdown check_breakdown(const JunctionState& s, const JunctionVariant& v, double V) {
  if (s.phase == Phase::Failed || std::abs(V) >= v.Vbreak || resistance_rt(s) <= v.RshortMax) return Breakdown::Failed;
  return Breakdown::Safe;
}

}  // namespace jjtune::twin

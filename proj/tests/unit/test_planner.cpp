#include <cmath>

#include "doctest.h"
#include "jjtune/errors.hpp"
#include "jjtune/planner.hpp"

using namespace jjtune;
using namespace jjtune::planner;
using namespace jjtune::units::literals;

namespace {

TuningTarget target_at(double fHz, double ecHz) {
  TuningTarget t;
  t.fTarget = Hertz(fHz);
  t.EC = Hertz(ecHz);
  return t;
}

twin::JunctionVariant quiet(const std::string& name = "low-dose-1") {
  twin::JunctionVariant v = twin::builtin_variant(name);
  v.hazard = {};
  return v;
}

double f0(double R, double ec) { return physics::f01_from_resistance(Ohms(R), Hertz(ec), {}).value(); }

}  // namespace

TEST_CASE("required total change") {
  CHECK(required_total_dr(5521.4_ohm, target_at(5485.3e6, 186.7e6)) ==
        doctest::Approx(0.0019732188282015617).epsilon(1e-8));
  CHECK(required_total_dr(5521.4_ohm, target_at(f0(5521.4, 186.7e6), 186.7e6)) == 0.0);
  CHECK(required_total_dr(5521.4_ohm, target_at(f0(5521.4, 150e6) / 2.0, 150e6)) ==
        doctest::Approx(2.7531091407343067).epsilon(1e-8));
  CHECK_THROWS_AS(required_total_dr(5521.4_ohm, target_at(6.0e9, 186.7e6)), InfeasibleError);
}

TEST_CASE("inverse consistency within 1 kHz") {
  for (double R = 4000.0; R <= 16000.0; R += 3000.0)
    for (double frac : {0.99, 0.9, 0.7, 0.5}) {
      const double ft = f0(R, 200e6) * frac;
      const double dr = required_total_dr(Ohms(R), target_at(ft, 200e6));
      CHECK(std::abs(f0(R * (1.0 + dr), 200e6) - ft) < 1e3);
    }
}

TEST_CASE("split of the total change into active and relaxation parts") {
  CHECK(split_active_target(0.10, 1.00, 0.0329).dRactive == doctest::Approx(0.0671));
  CHECK(split_active_target(0.10, 1.13, 0.0329).dRactive == doctest::Approx(0.0671 / 1.13));
  CHECK(split_active_target(0.07, 1.0, 0.0).dRactive == doctest::Approx(0.07));
  const auto over = split_active_target(0.02, 1.13, 0.0329);
  CHECK(over.dRactive == 0.0);
  CHECK(over.relaxationOvershoots);
  CHECK_THROWS_AS(split_active_target(0.1, 0.9, 0.0), DomainError);
}

TEST_CASE("amplitude choice") {
  const auto& v = twin::builtin_variant("low-dose-1");
  const auto c = choose_amplitude(v, 0.0671, 120.0, 0.1);
  CHECK(c.Va == doctest::Approx(0.8147016116884223).epsilon(1e-6));
  CHECK(c.duration == doctest::Approx(120.0).epsilon(1e-6));
  CHECK_FALSE(c.extended);
  CHECK(choose_amplitude(v, 0.0, 120.0, 0.1).noop);
  CHECK_THROWS_AS(choose_amplitude(v, 0.05, 120.0, 1.1), InfeasibleError);
  CHECK_THROWS_AS(choose_amplitude(v, 0.05, 0.0, 0.1), DomainError);
  // Needs more than the budget at the clamp: extended duration.
  const auto e = choose_amplitude(v, 0.05, 60.0, 0.3);
  CHECK(e.extended);
  CHECK(e.Va == doctest::Approx(0.8));
  CHECK(e.duration > 60.0);
}

TEST_CASE("feasibility monotonicity: a longer budget never raises the amplitude") {
  const auto& v = twin::builtin_variant("low-dose-2");
  for (double dr : {0.01, 0.05, 0.1}) {
    double prev = 10.0;
    for (double T = 30.0; T <= 1200.0; T *= 1.5) {
      const auto c = choose_amplitude(v, dr, T, 0.1);
      CHECK(c.Va <= prev + 1e-12);
      prev = c.Va;
    }
  }
}

TEST_CASE("stepped plan for a 270 % demand") {
  const auto v = quiet();
  TuningTarget t = target_at(f0(v.RW * 3.70, 215.9e6), 215.9e6);
  const auto plan = plan_steps(Ohms(v.RW), t, v, 0.10, 10800.0);
  CHECK(plan.steps.size() >= 27);
  CHECK(plan.predictedTotalDR == doctest::Approx(2.70).epsilon(1e-6));
  for (std::size_t i = 1; i < plan.steps.size(); ++i) CHECK(plan.steps[i].stopTotalDR > plan.steps[i - 1].stopTotalDR);
  for (const auto& s : plan.steps) CHECK(s.activeDR > 0.0);
  CHECK(plan.calibration == "low-dose-1");
}

TEST_CASE("demand within one step gives a single step") {
  const auto v = quiet();
  const auto plan = plan_steps(5521.4_ohm, target_at(5.35e9, 186.7e6), v, 0.10, 10800.0);
  REQUIRE(plan.steps.size() == 1);
  CHECK(plan.steps[0].tRelax == plan.horizon);
  CHECK(std::abs(plan.predictedF.value() - 5.35e9) < 1e3);
  CHECK(plan.warnings.empty());
}

TEST_CASE("demand below the relaxation offset warns") {
  const auto plan = plan_steps(5521.4_ohm, target_at(5.45e9, 186.7e6), quiet(), 0.10, 10800.0);
  CHECK_FALSE(plan.warnings.empty());
  CHECK(std::abs(plan.predictedF.value() - 5.45e9) > 1e6);
}

TEST_CASE("plan safety: every amplitude stays below Vbreak - margin") {
  for (const auto& name : {"low-dose-1", "low-dose-2", "medium-dose-1", "high-dose-1"}) {
    const auto v = quiet(name);
    for (double frac : {0.98, 0.9, 0.8}) {
      for (double margin : {0.1, 0.2}) {
        PlannerOptions opt;
        opt.margin = margin;
        const auto t = target_at(f0(v.RW, 200e6) * frac, 200e6);
        TuningPlan plan;
        try {
          plan = plan_steps(Ohms(v.RW), t, v, 0.10, 3600.0, opt);
        } catch (const InfeasiblePlan& e) {
          plan = e.partial();
        }
        for (const auto& s : plan.steps) CHECK(s.Va <= v.Vbreak - margin + 1e-12);
      }
    }
  }
}

TEST_CASE("demand beyond the cumulative limit is infeasible with a partial plan") {
  const auto v = quiet();
  TuningTarget t = target_at(f0(v.RW * 4.0, 215.9e6), 215.9e6);
  try {
    plan_steps(Ohms(v.RW), t, v, 0.10, 10800.0);
    FAIL("expected an infeasible plan");
  } catch (const InfeasiblePlan& e) {
    CHECK(e.partial().steps.size() >= 27);
  }
}

TEST_CASE("frequency uncertainty propagation") {
  TuningPlan p;
  p.budget.slopeSigma = 0.0;
  CHECK(predict_frequency_uncertainty(p, 5521.4_ohm, target_at(5.4e9, 186.7e6)).value() ==
        doctest::Approx(11270509.155528069).epsilon(1e-7));
  p.budget.offsetSigma = 0.0;
  CHECK(predict_frequency_uncertainty(p, 5521.4_ohm, target_at(5.4e9, 186.7e6)).value() == 0.0);
  TuningPlan q;
  q.predictedActiveDR = 0.10;
  q.predictedTotalDR = 0.10;
  CHECK(predict_frequency_uncertainty(q, 5521.4_ohm, target_at(5.4e9, 186.7e6)).value() ==
        doctest::Approx(11066169.754563332).epsilon(1e-6));
}

TEST_CASE("closed loop on an exactly known hazard-free twin") {
  const auto v = quiet();
  for (double frac : {0.97, 0.9}) {
    auto s = twin::make_state(v);
    Rng rng(21);
    const auto t = target_at(f0(v.RW, 200e6) * frac, 200e6);
    const auto out = closed_loop_execute(s, v, v, t, {}, rng);
    CHECK_FALSE(out.failed);
    CHECK(std::abs(out.residual.value()) <= out.initialPlan.budget.fSigma.value());
    CHECK_NOTHROW(out.trace.validate());
  }
}

TEST_CASE("zero-demand closed loop emits no pulses") {
  const auto v = quiet();
  auto s = twin::make_state(v);
  Rng rng(1);
  const auto out = closed_loop_execute(s, v, v, target_at(f0(v.RW, 200e6), 200e6), {}, rng);
  CHECK(out.stepsRun == 0);
  for (const auto& x : out.trace.samples) CHECK(x.phase != PhaseLabel::Active);
}

TEST_CASE("re-planning shrinks the overshoot of a misconfigured slope law") {
  const auto belief = quiet();
  twin::JunctionVariant truth = belief;
  truth.relaxLaw.slope.a *= 1.05;
  truth.relaxLaw.slope.b *= 1.05;
  const auto t = target_at(f0(belief.RW, 200e6) * 0.85, 200e6);
  ClosedLoopOptions open;
  open.replan = false;
  auto s1 = twin::make_state(truth);
  Rng r1(5);
  const auto a = closed_loop_execute(s1, truth, belief, t, open, r1);
  auto s2 = twin::make_state(truth);
  Rng r2(5);
  const auto b = closed_loop_execute(s2, truth, belief, t, {}, r2);
  CHECK(a.residual.value() < 0.0);  // overshoot: frequency below target
  CHECK(std::abs(b.residual.value()) < std::abs(a.residual.value()));
  CHECK(std::abs(b.residual.value()) < t.tolerance.value() * 10.0);
}

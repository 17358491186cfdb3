// One PASS/FAIL line per acceptance criterion. With an argument (AC1..AC10)
// only that criterion runs. Exit status is nonzero if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "jjtune/errors.hpp"
#include "jjtune/fitkit.hpp"
#include "jjtune/physics.hpp"
#include "jjtune/planner.hpp"
#include "jjtune/protocol.hpp"
#include "jjtune/twin.hpp"

using namespace jjtune;
using units::Hertz;
using units::Kelvin;
using units::Ohms;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  const char* id;
  const char* title;
  std::function<Outcome()> run;
};

bool within(double x, double ref, double tol) { return std::abs(x - ref) <= tol; }
bool within_rel(double x, double ref, double rel) { return std::abs(x - ref) <= rel * std::abs(ref); }

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

twin::JunctionVariant quiet(const std::string& name) {
  twin::JunctionVariant v = twin::builtin_variant(name);
  v.hazard = {};
  return v;
}

const physics::ConversionParams kConv{};

// Measured manipulation rates (Ohm/s) and curvatures (mOhm/s^2) of the low-
// and medium-dose junctions; the amplitudes run 0.75..0.95 V in 50 mV steps.
const std::vector<double> kVolts = {0.75, 0.80, 0.85, 0.90, 0.95};
const std::vector<double> kAlphaLd1 = {2.93, 6.42, 12.1, 22.6, 50.3};
const std::vector<double> kAlphaLd2 = {0.80, 1.56, 3.92, 8.48, 17.96};
const std::vector<std::pair<double, double>> kNegativeBeta = {
    {2.93, -2.6},    {6.42, -5.7},   {12.1, -8.23},  {22.6, -16.5},   {50.3, -33.0}, {0.80, -0.328},
    {1.56, -1.00},   {3.92, -2.46},  {8.48, -4.66},  {17.96, -7.9},   {1.99, -2.00}, {3.46, -3.09},
    {6.762, -4.71},  {10.449, -4.87}, {0.543, -0.076}, {0.78, -0.162}, {2.28, -0.95}, {0.130, -0.174},
    {0.255, -0.035}, {0.632, -0.173}, {1.70, -0.217}};

Outcome ac1() {
  constexpr double kTolR = 0.5, kTolEC = 0.2e6, kTolEJ = 0.02e9;
  const auto s = physics::solve_transmon_from_spectrum(Hertz(5.4910e9), Hertz(-203.0e6), kConv);
  return {within(s.R.value(), 5521.4, kTolR) && within(s.EC.value(), 186.7e6, kTolEC) &&
              within(s.EJ.value(), 21.63e9, kTolEJ),
          fmt::format("R = {:.2f} Ohm, EC = {:.3f} MHz, EJ = {:.4f} GHz", s.R.value(), s.EC.value() / 1e6,
                      s.EJ.value() / 1e9)};
}

Outcome ac2() {
  constexpr double kTolWidth = 0.1e6, kTolSide = 0.5e6;
  const auto s = physics::solve_transmon_from_spectrum(Hertz(5.4910e9), Hertz(-203.0e6), kConv);
  const auto b = physics::frequency_precision_bound(s.R, 0.0019, s.EC, kConv);
  return {within(b.width.value(), 11.3e6, kTolWidth) && within(b.fHigh.value(), 5496.6e6, kTolSide) &&
              within(b.fLow.value(), 5485.3e6, kTolSide),
          fmt::format("width = {:.3f} MHz, f_high = {:.3f} MHz, f_low = {:.3f} MHz", b.width.value() / 1e6,
                      b.fHigh.value() / 1e6, b.fLow.value() / 1e6)};
}

Outcome ac3() {
  constexpr double kTol = 0.01;
  const double Tc = physics::critical_temperature(units::ElectronVolts(174.3e-6)).value();
  return {within(Tc, 1.156, kTol), fmt::format("Tc = {:.4f} K", Tc)};
}

Outcome ac4() {
  constexpr double kTolAlpha = 0.10, kTolV0 = 0.05;
  struct Row {
    const char* name;
    const std::vector<double>* alpha;
    double alpha0;  // uOhm/s
    double V0;      // mV
  };
  const Row rows[] = {{"low-dose 1", &kAlphaLd1, 98.2, 72.5}, {"low-dose 2", &kAlphaLd2, 21.5, 70.4}};
  bool pass = true;
  std::string detail;
  for (const auto& r : rows) {
    const auto f = fitkit::fit_exponential_rate(kVolts, *r.alpha).logSpace;
    const double a0 = f.value("alpha0") * 1e6;
    const double v0 = f.value("V0") * 1e3;
    const bool ok = within_rel(a0, r.alpha0, kTolAlpha) && within_rel(v0, r.V0, kTolV0);
    pass = pass && ok;
    detail += fmt::format("{}{}: alpha0 = {:.2f} uOhm/s (ref {}), V0 = {:.2f} mV (ref {}) {}",
                          detail.empty() ? "" : "; ", r.name, a0, r.alpha0, v0, r.V0, ok ? "ok" : "off");
  }
  return {pass, detail};
}

Outcome ac5() {
  constexpr double kTolMedian = 0.10, kTolMean = 0.35;
  std::vector<double> minutes;
  for (const auto& [a, b] : kNegativeBeta) minutes.push_back(*twin::crossover_time(a, b * 1e-3) / 60.0);
  const double med = median(minutes);
  const double mean = std::accumulate(minutes.begin(), minutes.end(), 0.0) / static_cast<double>(minutes.size());
  return {minutes.size() == 21 && within_rel(med, 26.0, kTolMedian) && within_rel(mean, 50.0, kTolMean),
          fmt::format("{} ratios, median = {:.2f} min, mean = {:.2f} min", minutes.size(), med, mean)};
}

Outcome ac6() {
  constexpr double kTolInv = 1e-4, kFlat = 1e-12;
  const auto v = quiet("low-dose-1");
  const double inv = 1.0 / v.simmons.G0;

  auto s = twin::make_state(v);
  Rng rng(6);
  protocol::IterationSpec it;
  auto program = protocol::build_single_program(it, protocol::StopRule::max_iterations(40), 0.0);
  program.measurement.noise = 0.0;
  auto trace = protocol::run_program(s, v, program, rng);
  twin::apply_temperature(s, v, 77.0);
  ResistanceTrace cold;
  protocol::relax_and_probe(s, v, 10800.0, 60.0, program.measurement, rng, cold);

  const double R0 = cold.samples.front().R;
  double change = 0.0, spread = 0.0;
  const double G0 = physics::room_temperature_equivalent(1.0 / R0, Kelvin(77.0), v.simmons);
  for (const auto& x : cold.samples) {
    change = std::max(change, std::abs(x.R / R0 - 1.0));
    const double G = physics::room_temperature_equivalent(1.0 / x.R, Kelvin(77.0), v.simmons);
    spread = std::max(spread, std::abs(G / G0 - 1.0));
  }
  const double rt = 1.0 / G0;
  const bool corrected = within_rel(rt, twin::resistance_rt(s), 1e-9);
  return {within(inv, 1.1375, kTolInv) && change <= kFlat && spread <= kFlat && corrected,
          fmt::format("1/G0 = {:.5f}; 77 K relaxation: max |dR/R| = {:.1e}, corrected spread = {:.1e}, "
                      "corrected R = {:.3f} Ohm vs room-temperature {:.3f} Ohm",
                      inv, change, spread, rt, twin::resistance_rt(s))};
}

Outcome ac7() {
  constexpr double kMinDR = 2.695, kTolDf = 2e6, kMaxSeconds = 60.0;
  const auto start = std::chrono::steady_clock::now();
  const auto v = quiet("low-dose-1");
  auto s = twin::make_state(v);
  Rng rng(7);
  const auto program = protocol::build_stepped_program(0.10, 10800.0, 27, {});
  const auto trace = protocol::run_program(s, v, program, rng);
  const double total = trace.samples.back().R / trace.samples.front().R - 1.0;

  // Delta f over EC at R0 = 12.5 kOhm and 3.695 R0; scan, then bisect a bracket.
  const double R0 = 12500.0, target = -1964e6;
  auto df = [&](double ec) {
    return physics::f01_from_resistance(Ohms(R0 * 3.695), Hertz(ec), kConv).value() -
           physics::f01_from_resistance(Ohms(R0), Hertz(ec), kConv).value() - target;
  };
  double found = std::nan("");
  double prevEc = 150e6, prev = df(prevEc);
  for (double ec = 151e6; ec <= 280e6 + 1.0; ec += 1e6) {
    const double cur = df(ec);
    if ((prev <= 0.0) != (cur <= 0.0)) {
      double lo = prevEc, hi = ec;
      for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        ((df(mid) <= 0.0) == (prev <= 0.0) ? lo : hi) = mid;
      }
      found = 0.5 * (lo + hi);
      break;
    }
    prevEc = ec;
    prev = cur;
  }
  const bool hit = std::isfinite(found) && std::abs(df(found)) <= kTolDf;
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {total >= kMinDR && hit && seconds < kMaxSeconds && !trace.failed(),
          fmt::format("cumulative dR = {:.2f} % after {} steps; EC = {:.3f} MHz gives df = {:.3f} MHz; {:.2f} s",
                      100.0 * total, s.stepIndex, found / 1e6, (df(found) + target) / 1e6, seconds)};
}

// One relaxation session: stop at `stop` total change, then relax 3 h with 60 s probes.
fitkit::RelaxSession relax_session(const twin::JunctionVariant& v, double Va, double stop, Rng& rng,
                                   ResistanceTrace* out = nullptr) {
  auto s = twin::make_state(v);
  protocol::IterationSpec it;
  it.Va = Va;
  const auto program = protocol::build_single_program(it, protocol::StopRule::target_delta_r(stop), 10800.0);
  const auto trace = protocol::run_program(s, v, program, rng);
  const auto rs = fitkit::relaxation_series(trace);
  fitkit::RelaxSession session;
  const double R0 = trace.samples.front().R;
  session.dRactive = rs.Rstop / R0 - 1.0;
  session.tPrime.push_back(0.0);
  session.dRtotal.push_back(session.dRactive);
  for (std::size_t i = 0; i < rs.tPrime.size(); ++i) {
    session.tPrime.push_back(rs.tPrime[i]);
    session.dRtotal.push_back(rs.y[i] * rs.Rstop / R0 - 1.0);
  }
  if (out) *out = trace;
  return session;
}

Outcome ac8() {
  constexpr double kSigmaSlope = 0.01, kSigmaOffset = 0.0019, kK = 2.0;
  constexpr int kSeeds = 20;
  const auto v = quiet("low-dose-1");
  const double slopeRef = v.relaxLaw.slope(1800.0), offsetRef = v.relaxLaw.offset(1800.0);
  int good = 0;
  double worstSlope = 0.0, worstOffset = 0.0;
  for (int seed = 0; seed < kSeeds; ++seed) {
    Rng rng(800 + seed);
    std::vector<fitkit::RelaxSession> sessions;
    for (double stop : {0.02, 0.04, 0.06, 0.08, 0.10, 0.12}) sessions.push_back(relax_session(v, 0.85, stop, rng));
    const auto p = fitkit::relaxation_parameters(sessions, {1800.0});
    const double ds = std::abs(p.points[0].slope - slopeRef);
    const double dm = std::abs(p.points[0].offset - offsetRef);
    worstSlope = std::max(worstSlope, ds);
    worstOffset = std::max(worstOffset, dm);
    if (ds <= kK * kSigmaSlope && dm <= kK * kSigmaOffset) ++good;
  }
  return {good == kSeeds,
          fmt::format("{}/{} seeds within 2 sigma of k = {:.3f}, m = {:.2f} %; worst |dk| = {:.2e}, |dm| = {:.2e}",
                      good, kSeeds, slopeRef, 100.0 * offsetRef, worstSlope, worstOffset)};
}

Outcome ac9() {
  constexpr double kEpsilon = 5e-4;  // 0.05 percentage points
  constexpr int kManip = 50, kRelax = 100, kMinRelaxWins = 95;
  int violations = 0, poly2 = 0;
  for (int i = 0; i < kManip; ++i) {
    Rng rng(900 + i);
    const std::string name = i % 2 ? "low-dose-2" : "low-dose-1";
    const auto v = quiet(name);
    auto s = twin::make_state(v);
    protocol::IterationSpec it;
    it.Va = uniform(rng, 0.75, 0.90);
    const int iterations = static_cast<int>(uniform(rng, 60.0, 140.0));
    const auto program = protocol::build_single_program(it, protocol::StopRule::max_iterations(iterations), 0.0);
    const auto trace = protocol::run_program(s, v, program, rng);
    const auto f2 = fitkit::fit_poly_time(trace, 2);
    const auto f3 = fitkit::fit_poly_time(trace, 3);
    const auto cmp = fitkit::compare_models({f2, f3}, kEpsilon);
    const bool prefers2 = cmp.preferred && cmp.preferred_model() == "poly2";
    if (prefers2) ++poly2;
    if (f2.rmse - f3.rmse < kEpsilon && !prefers2) ++violations;
  }
  int logWins = 0;
  for (int i = 0; i < kRelax; ++i) {
    Rng rng(9000 + i);
    const auto v = quiet(i % 2 ? "low-dose-2" : "low-dose-1");
    ResistanceTrace trace;
    relax_session(v, uniform(rng, 0.78, 0.88), uniform(rng, 0.02, 0.12), rng, &trace);
    const auto rs = fitkit::relaxation_series(trace);
    const auto l = fitkit::fit_log_growth(rs.tPrime, rs.y, 1.0);
    const auto p = fitkit::fit_power_law(rs.tPrime, rs.y, 1.0);
    if (l.residVar < p.residVar) ++logWins;
  }
  return {violations == 0 && logWins >= kMinRelaxWins,
          fmt::format("manipulation: {}/{} prefer poly2, {} rule violations; relaxation: log beats power on {}/{}",
                      poly2, kManip, violations, logWins, kRelax)};
}

Outcome ac10() {
  std::vector<std::string> fails;
  std::string detail;

  {  // physics forward/inverse
    constexpr double kTolHz = 1e3;
    double worst = 0.0;
    for (double R = 3000.0; R <= 20000.0; R += 1700.0)
      for (double ec = 160e6; ec <= 300e6; ec += 35e6) {
        const double EJ = physics::josephson_energy_from_resistance(Ohms(R), kConv).value();
        const auto tp = physics::make_transmon(Hertz(EJ), Hertz(ec));
        const auto sol = physics::solve_transmon_from_spectrum(tp.f01, tp.eta, kConv);
        const auto back = physics::make_transmon(sol.EJ, sol.EC);
        worst = std::max({worst, std::abs(back.f01.value() - tp.f01.value()),
                          std::abs(back.eta.value() - tp.eta.value())});
      }
    if (worst > kTolHz) fails.push_back("physics");
    detail += fmt::format("physics worst {:.1e} Hz", worst);
  }

  {  // fitter noiseless roundtrips
    constexpr double kRel = 1e-8;
    double worst = 0.0;
    auto rel = [&](double got, double ref) { worst = std::max(worst, std::abs(got / ref - 1.0)); };
    Rng rng(10);
    for (int i = 0; i < 20; ++i) {
      std::vector<double> t, y2, y3, yl, yp;
      const double a = uniform(rng, 2e-4, 2e-3), b = -uniform(rng, 1e-7, 2e-6), g = uniform(rng, 1e-10, 1e-9);
      const double lb = uniform(rng, 0.005, 0.03), lt = uniform(rng, 20.0, 200.0);
      const double pc = uniform(rng, 0.002, 0.01), pd = uniform(rng, 0.15, 0.4);
      for (int k = 1; k <= 150; ++k) {
        const double ti = 4.0 * k;
        t.push_back(ti);
        y2.push_back(a * ti + b * ti * ti);
        y3.push_back(a * ti + b * ti * ti + g * ti * ti * ti);
        yl.push_back(1.0 + lb * std::log1p(60.0 * ti / lt));
        yp.push_back(1.0 + pc * std::pow(60.0 * ti, pd));
      }
      const auto f2 = fitkit::fit_poly_time(t, y2, 2);
      rel(f2.value("alpha"), a);
      rel(f2.value("beta"), b);
      const auto f3 = fitkit::fit_poly_time(t, y3, 3);
      rel(f3.value("gamma"), g);
      std::vector<double> tl(t);
      for (double& x : tl) x *= 60.0;
      const auto l = fitkit::fit_log_growth(tl, yl);
      rel(l.value("b"), lb);
      rel(l.value("tau"), lt);
      const auto p = fitkit::fit_power_law(tl, yp);
      rel(p.value("c"), pc);
      rel(p.value("d"), pd);
      const double a0 = uniform(rng, 1e-9, 1e-8), V0 = uniform(rng, 0.06, 0.08);
      std::vector<double> rates;
      for (double V : kVolts) rates.push_back(a0 * std::exp(V / V0));
      const auto e = fitkit::fit_exponential_rate(kVolts, rates);
      rel(e.refined.value("alpha0"), a0);
      rel(e.refined.value("V0"), V0);
      const double G0 = uniform(rng, 0.8, 0.95), T0 = uniform(rng, 500.0, 1000.0);
      std::vector<double> T, G;
      for (double x = 4.0; x <= 297.0; x += 15.0) {
        T.push_back(x);
        G.push_back(G0 * (1.0 + (x / T0) * (x / T0)));
      }
      const auto sf = fitkit::fit_simmons(T, G);
      rel(sf.value("G0"), G0);
      rel(sf.value("T0"), T0);
    }
    if (worst > kRel) fails.push_back("fitters");
    detail += fmt::format("; fitters worst {:.1e}", worst);
  }

  {  // twin determinism, hazards on
    bool same = true;
    for (const auto& name : {"low-dose-1", "medium-dose-1", "high-dose-1"}) {
      const auto& v = twin::builtin_variant(name);
      auto run = [&](std::uint64_t seed) {
        auto s = twin::make_state(v);
        Rng rng(seed);
        return protocol::run_program(s, v, protocol::build_stepped_program(0.05, 1800.0, 4, {}), rng);
      };
      for (std::uint64_t seed : {1ull, 2ull, 3ull}) same = same && run(seed).samples == run(seed).samples;
    }
    if (!same) fails.push_back("determinism");
    detail += same ? "; determinism ok" : "; determinism broken";
  }

  {  // planner safety
    int plans = 0, unsafe = 0;
    Rng rng(11);
    for (const auto& tv : twin::builtin_variants()) {
      for (int i = 0; i < 12; ++i) {
        planner::PlannerOptions opt;
        opt.margin = uniform(rng, 0.05, 0.35);
        planner::TuningTarget t;
        t.EC = Hertz(uniform(rng, 160e6, 260e6));
        t.fTarget = Hertz(physics::f01_from_resistance(Ohms(tv.RW), t.EC, kConv).value() * uniform(rng, 0.7, 0.99));
        planner::TuningPlan plan;
        try {
          plan = planner::plan_steps(Ohms(tv.RW), t, tv, 0.10, 10800.0, opt);
        } catch (const planner::InfeasiblePlan& e) {
          plan = e.partial();
        }
        ++plans;
        for (const auto& st : plan.steps)
          if (st.Va > tv.Vbreak - opt.margin) {
            ++unsafe;
            break;
          }
      }
    }
    if (unsafe) fails.push_back("planner safety");
    detail += fmt::format("; {} plans, {} unsafe", plans, unsafe);
  }

  {  // closed-loop convergence
    constexpr int kScenarios = 200;
    constexpr double kMinFraction = 0.95;
    int ok = 0;
    Rng pick(12);
    for (int i = 0; i < kScenarios; ++i) {
      const auto v = quiet(i % 2 ? "low-dose-2" : "low-dose-1");
      const double demand = uniform(pick, 0.05, 0.60);
      planner::TuningTarget t;
      t.EC = Hertz(uniform(pick, 170e6, 250e6));
      t.fTarget = physics::f01_from_resistance(Ohms(v.RW * (1.0 + demand)), t.EC, kConv);
      auto s = twin::make_state(v);
      Rng rng(1200 + i);
      try {
        const auto out = planner::closed_loop_execute(s, v, v, t, {}, rng);
        if (!out.failed && std::abs(out.residual.value()) <= out.initialPlan.budget.fSigma.value()) ++ok;
      } catch (const std::exception&) {
      }
    }
    const double frac = static_cast<double>(ok) / kScenarios;
    if (frac < kMinFraction) fails.push_back("closed loop");
    detail += fmt::format("; closed loop {}/{} within budget", ok, kScenarios);
  }

  if (!fails.empty()) {
    detail += "; failing:";
    for (const auto& f : fails) detail += " " + f;
  }
  return {fails.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all = {
      {"AC1", "transmon inverse solve", ac1},
      {"AC2", "frequency precision bound", ac2},
      {"AC3", "critical temperature", ac3},
      {"AC4", "exponential rate law fit", ac4},
      {"AC5", "crossover statistic", ac5},
      {"AC6", "Simmons consistency", ac6},
      {"AC7", "stepped campaign", ac7},
      {"AC8", "relaxation law recovery", ac8},
      {"AC9", "model selection", ac9},
      {"AC10", "property suites", ac10},
  };
  const std::string only = argc > 1 ? argv[1] : "";
  int failed = 0, ran = 0;
  for (const auto& c : all) {
    if (!only.empty() && only != c.id) continue;
    ++ran;
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    fmt::print("{:<4} {} {}: {}\n", c.id, o.pass ? "PASS" : "FAIL", c.title, o.detail);
    std::fflush(stdout);
  }
  if (ran == 0) {
    fmt::print(stderr, "unknown criterion '{}'\n", only);
    return 2;
  }
  return failed == 0 ? 0 : 1;
}

#include <cmath>

#include "doctest.h"
#include "jjtune/errors.hpp"
#include "jjtune/fitkit.hpp"
#include "jjtune/protocol.hpp"

using namespace jjtune;
using namespace jjtune::fitkit;

namespace {

constexpr double kRoundtrip = 1e-8;

std::vector<double> grid(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

}  // namespace

TEST_CASE("linear fit recovers slope and offset") {
  const auto x = grid(0.0, 10.0, 11);
  std::vector<double> y;
  for (double xi : x) y.push_back(2.5 * xi - 1.25);
  const auto f = fit_linear(x, y);
  CHECK(f.value("slope") == doctest::Approx(2.5).epsilon(kRoundtrip));
  CHECK(f.value("offset") == doctest::Approx(-1.25).epsilon(kRoundtrip));
  CHECK(f.rmse < 1e-12);
  CHECK(f.parameter_count() == 2);
  CHECK_THROWS_AS(fit_linear({1.0}, {2.0}), DomainError);
  CHECK_THROWS(f.param("gamma"));
}

TEST_CASE("polynomial-in-time fits: noiseless roundtrip") {
  const auto t = grid(1.0, 600.0, 120);
  std::vector<double> y2, y3;
  for (double ti : t) {
    y2.push_back(1.1e-3 * ti - 7.0e-7 * ti * ti);
    y3.push_back(1.1e-3 * ti - 7.0e-7 * ti * ti + 4.0e-10 * ti * ti * ti);
  }
  const auto f2 = fit_poly_time(t, y2, 2);
  CHECK(f2.value("alpha") == doctest::Approx(1.1e-3).epsilon(kRoundtrip));
  CHECK(f2.value("beta") == doctest::Approx(-7.0e-7).epsilon(kRoundtrip));
  const auto f3 = fit_poly_time(t, y3, 3);
  CHECK(f3.value("alpha") == doctest::Approx(1.1e-3).epsilon(kRoundtrip));
  CHECK(f3.value("beta") == doctest::Approx(-7.0e-7).epsilon(kRoundtrip));
  CHECK(f3.value("gamma") == doctest::Approx(4.0e-10).epsilon(kRoundtrip));
  CHECK_THROWS_AS(fit_poly_time(t, y2, 4), DomainError);
}

TEST_CASE("exponential rate fit on the measured low-dose 1 rates") {
  const std::vector<double> V = {0.75, 0.80, 0.85, 0.90, 0.95};
  const std::vector<double> a = {2.93, 6.42, 12.1, 22.6, 50.3};  // Ohm/s
  const auto f = fit_exponential_rate(V, a);
  CHECK(f.logSpace.value("alpha0") == doctest::Approx(90.24369099231255e-6).epsilon(1e-8));
  CHECK(f.logSpace.value("V0") == doctest::Approx(71.9990393939217e-3).epsilon(1e-8));
  CHECK(f.refined.value("alpha0") == doctest::Approx(43.34140128204277e-6).epsilon(1e-4));
  CHECK(f.refined.value("V0") == doctest::Approx(68.06781507804396e-3).epsilon(1e-5));
}

TEST_CASE("exponential rate fit: noiseless roundtrip in both spaces") {
  const auto V = grid(0.7, 1.0, 7);
  std::vector<double> a;
  for (double v : V) a.push_back(8.24e-9 * std::exp(v / 0.0725));
  const auto f = fit_exponential_rate(V, a);
  CHECK(f.logSpace.value("alpha0") == doctest::Approx(8.24e-9).epsilon(kRoundtrip));
  CHECK(f.logSpace.value("V0") == doctest::Approx(0.0725).epsilon(kRoundtrip));
  CHECK(f.refined.value("alpha0") == doctest::Approx(8.24e-9).epsilon(kRoundtrip));
  CHECK(f.refined.value("V0") == doctest::Approx(0.0725).epsilon(kRoundtrip));
  CHECK(f.agree);
  CHECK_THROWS_AS(fit_exponential_rate({0.8, 0.9}, {1.0, -1.0}), DomainError);
}

TEST_CASE("log-growth and power-law fits: noiseless roundtrip") {
  const auto t = grid(60.0, 86400.0, 200);
  std::vector<double> yl, yp;
  for (double ti : t) {
    yl.push_back(1.0 + 0.012 * std::log1p(ti / 45.0));
    yp.push_back(1.0 + 0.004 * std::pow(ti, 0.21));
  }
  const auto l = fit_log_growth(t, yl);
  CHECK(l.value("a") == doctest::Approx(1.0).epsilon(kRoundtrip));
  CHECK(l.value("b") == doctest::Approx(0.012).epsilon(kRoundtrip));
  CHECK(l.value("tau") == doctest::Approx(45.0).epsilon(kRoundtrip));
  const auto p = fit_power_law(t, yp);
  CHECK(p.value("a") == doctest::Approx(1.0).epsilon(kRoundtrip));
  CHECK(p.value("c") == doctest::Approx(0.004).epsilon(kRoundtrip));
  CHECK(p.value("d") == doctest::Approx(0.21).epsilon(kRoundtrip));
}

TEST_CASE("log-growth lower bound and degenerate data") {
  const auto t = grid(10.0, 1000.0, 30);
  std::vector<double> y;
  for (double ti : t) y.push_back(0.99 + 0.01 * std::log1p(ti / 60.0));
  const auto f = fit_log_growth(t, y, 1.0);
  CHECK(f.value("a") >= 1.0);
  CHECK(f.param("a").atBound);
  const std::vector<double> flat(t.size(), 1.02);
  const auto c = fit_log_growth(t, flat);
  CHECK(c.value("b") == 0.0);
  CHECK_FALSE(c.param("tau").identifiable);
  CHECK_THROWS_AS(fit_power_law({0.0, 1.0, 2.0, 3.0}, {1.0, 1.0, 1.0, 1.0}), DomainError);
}

TEST_CASE("Simmons fit") {
  const auto T = grid(4.0, 297.0, 20);
  std::vector<double> G;
  for (double x : T) G.push_back(0.8791 * (1.0 + (x / 779.5) * (x / 779.5)));
  const auto f = fit_simmons(T, G);
  CHECK(f.value("G0") == doctest::Approx(0.8791).epsilon(kRoundtrip));
  CHECK(f.value("T0") == doctest::Approx(779.5).epsilon(kRoundtrip));
  const auto n = fit_simmons(T, G, 297.0);
  CHECK(n.value("G0") * (1.0 + std::pow(297.0 / n.value("T0"), 2)) == doctest::Approx(1.0).epsilon(1e-9));
  std::vector<double> falling;
  for (double x : T) falling.push_back(1.0 - 1e-6 * x * x);
  const auto d = fit_simmons(T, falling);
  CHECK(std::isinf(d.value("T0")));
  CHECK_FALSE(d.converged);
}

TEST_CASE("model comparison prefers the simpler model within epsilon") {
  FitResult a{"poly2", {{"alpha", 1.0}, {"beta", 0.0}}, 1.0e-4, 0.0, 0.0, 10, true, {}};
  FitResult b{"poly3", {{"alpha", 1.0}, {"beta", 0.0}, {"gamma", 0.0}}, 0.8e-4, 0.0, 0.0, 10, true, {}};
  CHECK(compare_models({a, b}).preferred_model() == "poly2");
  a.rmse = 7e-4;
  b.rmse = 1e-4;
  CHECK(compare_models({a, b}).preferred_model() == "poly3");
  b.converged = false;
  const auto cmp = compare_models({a, b});
  CHECK(cmp.preferred_model() == "poly2");
  CHECK_FALSE(cmp.rows[1].included);
  CHECK_THROWS_AS(compare_models({a}, -1.0), DomainError);
}

TEST_CASE("drop detection on a twin trace") {
  twin::JunctionVariant v = twin::builtin_variant("high-dose-1");
  v.hazard = {};
  auto s = twin::make_state(v);
  Rng rng(3);
  protocol::IterationSpec it;
  it.Va = 0.95;
  const auto tr =
      protocol::run_program(s, v, protocol::build_single_program(it, protocol::StopRule::max_iterations(100), 0.0), rng);
  const auto d = detect_drop(tr);
  CHECK(d.excludedPoints > 0);
  CHECK(d.depth == doctest::Approx(0.015).epsilon(0.15));
  CHECK(d.duration == doctest::Approx(30.0).epsilon(0.2));
  CHECK_FALSE(d.wholeTrace);
  const auto series = active_series(tr);
  CHECK(series.t.size() == tr.samples.size() - d.excludedPoints - 1);
  CHECK_THROWS_AS(detect_drop(tr, 0), DomainError);
}

TEST_CASE("drop detection without a drop") {
  ResistanceTrace tr;
  for (int i = 0; i < 10; ++i) tr.samples.push_back({double(i), 100.0 + i, 297.0, PhaseLabel::Active});
  const auto d = detect_drop(tr);
  CHECK(d.excludedPoints == 0);
  CHECK(d.depth == 0.0);
}

TEST_CASE("relaxation parameters from synthetic sessions") {
  std::vector<RelaxSession> sessions;
  for (double act : {0.02, 0.05, 0.08, 0.11}) {
    RelaxSession s;
    s.dRactive = act;
    for (double tp = 0.0; tp <= 7200.0; tp += 60.0) {
      const double k = 1.0 + 0.04 * std::log1p(tp / 60.0);
      const double m = 0.0096 * std::log1p(tp / 60.0);
      s.tPrime.push_back(tp);
      s.dRtotal.push_back(k * act + m);
    }
    sessions.push_back(s);
  }
  const auto p = relaxation_parameters(sessions, {600.0, 1800.0, 3600.0, 7200.0}, true);
  CHECK(p.points.size() == 4);
  CHECK(p.points[1].slope == doctest::Approx(1.0 + 0.04 * std::log(31.0)).epsilon(1e-9));
  CHECK(p.points[1].offset == doctest::Approx(0.0096 * std::log(31.0)).epsilon(1e-9));
  REQUIRE(p.slopeLaw.has_value());
  CHECK(p.slopeLaw->value("b") == doctest::Approx(0.04).epsilon(1e-6));
  sessions.resize(2);
  CHECK_THROWS_AS(relaxation_parameters(sessions, {600.0}), DomainError);
}

TEST_CASE("residual statistics") {
  FitResult f;
  set_residual_stats(f, {1.0, -1.0, 1.0, -1.0});
  CHECK(f.rmse == doctest::Approx(1.0));
  CHECK(f.residMean == doctest::Approx(0.0));
  CHECK(f.nPoints == 4);
  CHECK(to_ohmic(0.001, 5000.0) == doctest::Approx(5.0));
  CHECK_THROWS_AS(to_ohmic(0.001, 0.0), DomainError);
}

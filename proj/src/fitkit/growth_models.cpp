#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "jjtune/errors.hpp"
#include "jjtune/fitkit.hpp"
#include "least_squares.hpp"

namespace jjtune::fitkit {

namespace {

using Basis = std::function<double(double t, double theta)>;

struct Profile {
  double a = 0.0;
  double b = 0.0;
  double cost = std::numeric_limits<double>::infinity();
};

// y = a + b g(t; theta) solved linearly at fixed theta (and optionally fixed a).
Profile profile(const std::vector<double>& t, const std::vector<double>& y, const Basis& g, double theta,
                std::optional<double> fixedA) {
  Profile p;
  const std::size_t n = t.size();
  std::vector<double> col(n);
  for (std::size_t i = 0; i < n; ++i) col[i] = g(t[i], theta);
  if (fixedA) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      num += col[i] * (y[i] - *fixedA);
      den += col[i] * col[i];
    }
    p.a = *fixedA;
    p.b = den > 0.0 ? num / den : 0.0;
  } else {
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      sx += col[i];
      sy += y[i];
      sxx += col[i] * col[i];
      sxy += col[i] * y[i];
    }
    const double nn = static_cast<double>(n);
    const double det = nn * sxx - sx * sx;
    if (!(std::abs(det) > 1e-300)) return p;
    p.b = (nn * sxy - sx * sy) / det;
    p.a = (sy - p.b * sx) / nn;
  }
  p.cost = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = p.a + p.b * col[i] - y[i];
    p.cost += r * r;
  }
  return p;
}

struct GrowthSpec {
  std::string model;
  std::string bName;
  std::string thetaName;
  Basis basis;
  std::vector<double> grid;
  // LM works on u = toU(theta).
  std::function<double(double)> toU;
  std::function<double(double)> fromU;
  double uLo;
  double uHi;
};

FitResult fit_growth(const GrowthSpec& spec, const std::vector<double>& t, const std::vector<double>& y,
                     std::optional<double> fixedA) {
  Profile best;
  double bestTheta = spec.grid.front();
  for (double th : spec.grid) {
    const auto p = profile(t, y, spec.basis, th, fixedA);
    if (p.cost < best.cost) {
      best = p;
      bestTheta = th;
    }
  }

  detail::LmProblem pb;
  pb.nResiduals = t.size();
  pb.p0 = {best.a, best.b, spec.toU(bestTheta)};
  const double inf = std::numeric_limits<double>::infinity();
  pb.lower = {-inf, -inf, spec.uLo};
  pb.upper = {inf, inf, spec.uHi};
  pb.fixed = {fixedA.has_value(), false, false};
  pb.residual = [&](const std::vector<double>& p, std::vector<double>& r) {
    const double th = spec.fromU(p[2]);
    for (std::size_t i = 0; i < t.size(); ++i) r[i] = p[0] + p[1] * spec.basis(t[i], th) - y[i];
  };
  const auto lm = detail::levenberg_marquardt(pb);

  FitResult f;
  f.model = spec.model;
  const double theta = spec.fromU(lm.p[2]);
  // d theta / du by central difference for the error propagation.
  const double du = 1e-6 * std::max(1.0, std::abs(lm.p[2]));
  const double dth = (spec.fromU(lm.p[2] + du) - spec.fromU(lm.p[2] - du)) / (2.0 * du);
  f.params = {{"a", lm.p[0], lm.stdErr[0], fixedA.has_value()},
              {spec.bName, lm.p[1], lm.stdErr[1]},
              {spec.thetaName, theta, std::abs(dth) * lm.stdErr[2]}};
  const bool edge = lm.p[2] <= spec.uLo || lm.p[2] >= spec.uHi;
  f.params[2].atBound = edge;
  if (lm.singular || lm.p[1] == 0.0) {
    f.params[2].identifiable = false;
    f.notes.push_back(spec.thetaName + " unidentifiable");
  }
  f.converged = lm.converged && std::isfinite(lm.p[0]) && std::isfinite(lm.p[1]) && std::isfinite(theta);
  set_residual_stats(f, lm.residuals);
  return f;
}

bool is_constant(const std::vector<double>& y) {
  const auto [lo, hi] = std::minmax_element(y.begin(), y.end());
  return *hi - *lo <= 1e-12 * std::max(1.0, std::max(std::abs(*lo), std::abs(*hi)));
}

FitResult bounded_fit(const GrowthSpec& spec, const std::vector<double>& t, const std::vector<double>& y,
                      std::optional<double> lowerBoundA) {
  if (is_constant(y)) {
    FitResult f;
    f.model = spec.model;
    double mean = 0.0;
    for (double v : y) mean += v;
    mean /= static_cast<double>(y.size());
    const bool clamp = lowerBoundA && mean < *lowerBoundA;
    const double a = clamp ? *lowerBoundA : mean;
    f.params = {{"a", a, 0.0, clamp}, {spec.bName, 0.0, 0.0}, {spec.thetaName, spec.grid.front(), 0.0, false, false}};
    f.notes.push_back(spec.thetaName + " unidentifiable: constant data");
    f.converged = true;
    std::vector<double> r(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) r[i] = a - y[i];
    set_residual_stats(f, r);
    return f;
  }
  FitResult f = fit_growth(spec, t, y, std::nullopt);
  if (lowerBoundA && f.params[0].value < *lowerBoundA) {
    f = fit_growth(spec, t, y, *lowerBoundA);
    f.notes.push_back("a held at its lower bound");
  }
  return f;
}

}  // namespace

FitResult fit_log_growth(const std::vector<double>& t, const std::vector<double>& y,
                         std::optional<double> lowerBoundA) {
  if (t.size() != y.size()) throw DomainError("t and y differ in length");
  if (t.size() < 4) throw DomainError("log-growth fit needs at least 4 points");
  for (double ti : t)
    if (!(ti >= 0.0)) throw DomainError("log-growth fit needs t >= 0");
  GrowthSpec spec;
  spec.model = "log-growth";
  spec.bName = "b";
  spec.thetaName = "tau";
  spec.basis = [](double ti, double tau) { return std::log1p(ti / tau); };
  for (int k = 0; k <= 20; ++k) spec.grid.push_back(std::pow(10.0, k / 4.0));
  spec.toU = [](double tau) { return std::log(tau); };
  spec.fromU = [](double u) { return std::exp(u); };
  spec.uLo = std::log(1e-3);
  spec.uHi = std::log(1e9);
  return bounded_fit(spec, t, y, lowerBoundA);
}

FitResult fit_power_law(const std::vector<double>& t, const std::vector<double>& y,
                        std::optional<double> lowerBoundA) {
  if (t.size() != y.size()) throw DomainError("t and y differ in length");
  if (t.size() < 4) throw DomainError("power-law fit needs at least 4 points");
  for (double ti : t)
    if (!(ti > 0.0)) throw DomainError("power-law fit needs t > 0");
  GrowthSpec spec;
  spec.model = "power-law";
  spec.bName = "c";
  spec.thetaName = "d";
  spec.basis = [](double ti, double d) { return std::pow(ti, d); };
  for (int k = 1; k <= 50; ++k) spec.grid.push_back(k / 50.0);
  spec.toU = [](double d) { return d; };
  spec.fromU = [](double u) { return u; };
  spec.uLo = 1e-6;
  spec.uHi = 1.0;
  return bounded_fit(spec, t, y, lowerBoundA);
}

}  // namespace jjtune::fitkit

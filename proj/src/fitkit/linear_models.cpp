#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "jjtune/errors.hpp"
#include "jjtune/fitkit.hpp"
#include "least_squares.hpp"

namespace jjtune::fitkit {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_sizes(const std::vector<double>& x, const std::vector<double>& y, std::size_t minPoints) {
  if (x.size() != y.size()) throw DomainError("x and y differ in length");
  if (x.size() < minPoints) throw DomainError("need at least " + std::to_string(minPoints) + " points");
}

bool both_within(double a, double sa, double b, double sb) {
  const double tol = (std::isfinite(sa) ? sa : 0.0) + (std::isfinite(sb) ? sb : 0.0);
  return std::abs(a - b) <= std::max(tol, 1e-8 * std::max(std::abs(a), std::abs(b)));
}

}  // namespace

FitResult fit_linear(const std::vector<double>& x, const std::vector<double>& y) {
  check_sizes(x, y, 2);
  std::vector<double> X;
  X.reserve(2 * x.size());
  for (double xi : x) {
    X.push_back(xi);
    X.push_back(1.0);
  }
  const auto sol = detail::linear_least_squares(X, 2, y);
  FitResult f;
  f.model = "linear";
  f.params = {{"slope", sol.coef[0], sol.stdErr[0]}, {"offset", sol.coef[1], sol.stdErr[1]}};
  f.converged = true;
  set_residual_stats(f, sol.residuals);
  return f;
}

FitResult fit_poly_time(const std::vector<double>& t, const std::vector<double>& dR, int order) {
  if (order != 2 && order != 3) throw DomainError("polynomial order must be 2 or 3");
  check_sizes(t, dR, static_cast<std::size_t>(order) + 2);
  const auto k = static_cast<std::size_t>(order);
  std::vector<double> X;
  X.reserve(k * t.size());
  for (double ti : t) {
    double p = ti;
    for (std::size_t j = 0; j < k; ++j, p *= ti) X.push_back(p);
  }
  const auto sol = detail::linear_least_squares(X, k, dR);
  FitResult f;
  f.model = order == 2 ? "poly2" : "poly3";
  f.params = {{"alpha", sol.coef[0], sol.stdErr[0]}, {"beta", sol.coef[1], sol.stdErr[1]}};
  if (order == 3) f.params.push_back({"gamma", sol.coef[2], sol.stdErr[2]});
  f.converged = true;
  set_residual_stats(f, sol.residuals);
  return f;
}

ExponentialRateFit fit_exponential_rate(const std::vector<double>& V, const std::vector<double>& alpha) {
  check_sizes(V, alpha, 2);
  for (double a : alpha)
    if (!(a > 0.0)) throw DomainError("exponential-rate fit needs alpha > 0");

  std::vector<double> lnA(alpha.size());
  std::transform(alpha.begin(), alpha.end(), lnA.begin(), [](double a) { return std::log(a); });
  const FitResult lin = fit_linear(V, lnA);
  const double s = lin.value("slope");
  const double c = lin.value("offset");
  if (!(s > 0.0)) throw DomainError("alpha does not grow with V; V0 undefined");

  ExponentialRateFit out;
  auto& L = out.logSpace;
  L.model = "exponential-log";
  const double a0 = std::exp(c);
  L.params = {{"alpha0", a0, a0 * lin.param("offset").stdErr}, {"V0", 1.0 / s, lin.param("slope").stdErr / (s * s)}};
  L.converged = true;
  std::vector<double> r(V.size());
  for (std::size_t i = 0; i < V.size(); ++i) r[i] = a0 * std::exp(V[i] * s) - alpha[i];
  set_residual_stats(L, r);

  detail::LmProblem pb;
  pb.nResiduals = V.size();
  pb.p0 = {a0, 1.0 / s};
  pb.lower = {0.0, 1e-9};
  pb.upper = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  pb.residual = [&](const std::vector<double>& p, std::vector<double>& res) {
    for (std::size_t i = 0; i < V.size(); ++i) res[i] = p[0] * std::exp(V[i] / p[1]) - alpha[i];
  };
  const auto lm = detail::levenberg_marquardt(pb);
  auto& R = out.refined;
  R.model = "exponential-linear";
  R.params = {{"alpha0", lm.p[0], lm.stdErr[0]}, {"V0", lm.p[1], lm.stdErr[1]}};
  R.converged = lm.converged;
  set_residual_stats(R, lm.residuals);

  out.agree = both_within(L.params[0].value, L.params[0].stdErr, R.params[0].value, R.params[0].stdErr) &&
              both_within(L.params[1].value, L.params[1].stdErr, R.params[1].value, R.params[1].stdErr);
  return out;
}

FitResult fit_simmons(const std::vector<double>& T, const std::vector<double>& Gin,
                      std::optional<double> normalizeAt) {
  check_sizes(T, Gin, 3);
  for (std::size_t i = 0; i < T.size(); ++i) {
    if (!(T[i] >= 0.0)) throw DomainError("temperatures must be non-negative");
    if (!(Gin[i] > 0.0)) throw DomainError("conductances must be positive");
  }
  if (std::set<double>(T.begin(), T.end()).size() < 2) throw DomainError("Simmons fit is underdetermined");

  std::vector<double> G = Gin;
  if (normalizeAt) {
    std::vector<std::size_t> idx(T.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return T[a] < T[b]; });
    const double t = *normalizeAt;
    if (t < T[idx.front()] || t > T[idx.back()]) throw DomainError("normalization temperature outside data");
    double ref = G[idx.back()];
    for (std::size_t k = 1; k < idx.size(); ++k) {
      const double t0 = T[idx[k - 1]], t1 = T[idx[k]];
      if (t <= t1 && t1 > t0) {
        ref = G[idx[k - 1]] + (G[idx[k]] - G[idx[k - 1]]) * (t - t0) / (t1 - t0);
        break;
      }
    }
    for (double& g : G) g /= ref;
  }

  std::vector<double> T2(T.size());
  std::transform(T.begin(), T.end(), T2.begin(), [](double t) { return t * t; });
  const FitResult lin = fit_linear(T2, G);
  const double G0 = lin.value("offset");
  const double slope = lin.value("slope");

  FitResult f;
  f.model = "simmons";
  if (!(slope > 0.0) || !(G0 > 0.0)) {
    f.params = {{"G0", G0, lin.param("offset").stdErr},
                {"T0", std::numeric_limits<double>::infinity(), kNaN, false, false}};
    f.converged = false;
    f.notes.push_back("no quadratic temperature dependence; T0 unidentifiable");
    std::vector<double> r(T.size());
    for (std::size_t i = 0; i < T.size(); ++i) r[i] = G0 - G[i];
    set_residual_stats(f, r);
    return f;
  }

  detail::LmProblem pb;
  pb.nResiduals = T.size();
  pb.p0 = {G0, std::sqrt(G0 / slope)};
  pb.lower = {0.0, 1e-12};
  pb.upper = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  pb.residual = [&](const std::vector<double>& p, std::vector<double>& r) {
    for (std::size_t i = 0; i < T.size(); ++i) {
      const double x = T[i] / p[1];
      r[i] = p[0] * (1.0 + x * x) - G[i];
    }
  };
  const auto lm = detail::levenberg_marquardt(pb);
  f.params = {{"G0", lm.p[0], lm.stdErr[0]}, {"T0", lm.p[1], lm.stdErr[1]}};
  f.converged = lm.converged;
  set_residual_stats(f, lm.residuals);
  return f;
}

}  // namespace jjtune::fitkit

#include <algorithm>
#include <cmath>

#include "jjtune/errors.hpp"
#include "jjtune/fitkit.hpp"

namespace jjtune::fitkit {

const ParamEstimate& FitResult::param(const std::string& name) const {
  for (const auto& p : params)
    if (p.name == name) return p;
  throw DomainError("fit '" + model + "' has no parameter '" + name + "'");
}

void set_residual_stats(FitResult& fit, const std::vector<double>& r) {
  fit.nPoints = r.size();
  if (r.empty()) {
    fit.rmse = fit.residMean = fit.residVar = 0.0;
    return;
  }
  const double n = static_cast<double>(r.size());
  double sum = 0.0;
  double sq = 0.0;
  for (double x : r) {
    sum += x;
    sq += x * x;
  }
  fit.residMean = sum / n;
  fit.rmse = std::sqrt(sq / n);
  double var = 0.0;
  for (double x : r) var += (x - fit.residMean) * (x - fit.residMean);
  fit.residVar = var / n;
}

const std::string& ModelComparison::preferred_model() const {
  if (!preferred) throw DomainError("no model could be preferred");
  return rows[*preferred].model;
}

ModelComparison compare_models(const std::vector<FitResult>& results, double epsilon) {
  if (!(epsilon >= 0.0)) throw DomainError("epsilon must be non-negative");
  ModelComparison cmp;
  std::optional<double> best;
  for (const auto& f : results) {
    ComparisonRow row{f.model, f.parameter_count(), f.rmse, f.residMean, f.residVar, false};
    row.included = f.converged && std::isfinite(f.rmse);
    if (!row.included) cmp.notes.push_back(f.model + ": excluded, fit did not converge");
    if (row.included && (!best || row.rmse < *best)) best = row.rmse;
    cmp.rows.push_back(row);
  }
  for (std::size_t i = 0; i < cmp.rows.size(); ++i) {
    const auto& row = cmp.rows[i];
    if (!row.included || row.rmse > *best + epsilon) continue;
    if (!cmp.preferred) {
      cmp.preferred = i;
      continue;
    }
    const auto& cur = cmp.rows[*cmp.preferred];
    if (row.nParams < cur.nParams || (row.nParams == cur.nParams && row.rmse < cur.rmse)) cmp.preferred = i;
  }
  return cmp;
}

double to_ohmic(double fractionalRate, double R0) {
  if (!(R0 > 0.0)) throw DomainError("R0 must be positive");
  return fractionalRate * R0;
}

}  // namespace jjtune::fitkit

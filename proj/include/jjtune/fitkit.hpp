#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "jjtune/trace.hpp"

// Least-squares fits of the empirical resistance models.
namespace jjtune::fitkit {

struct ParamEstimate {
  std::string name;
  double value = 0.0;
  double stdErr = 0.0;  // 1 sigma; NaN when not estimable
  bool atBound = false;
  bool identifiable = true;
};

struct FitResult {
  std::string model;
  std::vector<ParamEstimate> params;
  double rmse = 0.0;
  double residMean = 0.0;
  double residVar = 0.0;
  std::size_t nPoints = 0;
  bool converged = false;
  std::vector<std::string> notes;

  const ParamEstimate& param(const std::string& name) const;
  double value(const std::string& name) const { return param(name).value; }
  // Adjustable parameters (fixed-at-bound ones still count: the model carries them).
  std::size_t parameter_count() const { return params.size(); }
};

// Fills rmse and the residual statistics from a residual vector.
void set_residual_stats(FitResult& fit, const std::vector<double>& residuals);

FitResult fit_linear(const std::vector<double>& x, const std::vector<double>& y);

struct DropSegment {
  double duration = 0.0;
  double depth = 0.0;
  std::size_t excludedPoints = 0;
  bool wholeTrace = false;
};

// Initial interval with R below R(0), ending before the first run of
// `sustained` consecutive increases.
DropSegment detect_drop(const ResistanceTrace& trace, int sustained = 3);

// dR(t) = sum_k c_k t^k, k = 1..order.
FitResult fit_poly_time(const std::vector<double>& t, const std::vector<double>& dR, int order);

// Active samples of a trace after removing the drop; time and dR are
// re-referenced to the first retained sample.
struct ActiveSeries {
  std::vector<double> t;
  std::vector<double> dR;
  DropSegment drop;
};

ActiveSeries active_series(const ResistanceTrace& trace, int sustained = 3);

// fit_poly_time on active_series(trace).
FitResult fit_poly_time(const ResistanceTrace& trace, int order, int sustained = 3);

struct ExponentialRateFit {
  FitResult logSpace;
  FitResult refined;
  // |difference| <= sum of both standard errors, for alpha0 and V0.
  bool agree = false;
};

ExponentialRateFit fit_exponential_rate(const std::vector<double>& V, const std::vector<double>& alpha);

FitResult fit_log_growth(const std::vector<double>& t, const std::vector<double>& y,
                         std::optional<double> lowerBoundA = std::nullopt);

FitResult fit_power_law(const std::vector<double>& t, const std::vector<double>& y,
                        std::optional<double> lowerBoundA = std::nullopt);

struct ComparisonRow {
  std::string model;
  std::size_t nParams = 0;
  double rmse = 0.0;
  double residMean = 0.0;
  double residVar = 0.0;
  bool included = false;
};

struct ModelComparison {
  std::vector<ComparisonRow> rows;
  std::optional<std::size_t> preferred;  // index into rows
  std::vector<std::string> notes;

  const std::string& preferred_model() const;
};

// Lowest-parameter converged model whose rmse is within epsilon of the best.
ModelComparison compare_models(const std::vector<FitResult>& results, double epsilon = 5e-4);

// G(T) = G0 (1 + (T / T0)^2). With normalizeAt, G is divided by its
// interpolated value at that temperature first.
FitResult fit_simmons(const std::vector<double>& T, const std::vector<double>& G,
                      std::optional<double> normalizeAt = std::nullopt);

struct RelaxSession {
  double dRactive = 0.0;         // fractional change at the stop
  std::vector<double> tPrime;    // s after the stop
  std::vector<double> dRtotal;   // fractional change relative to R(0)
};

struct RelaxPoint {
  double tPrime = 0.0;
  double slope = 0.0;
  double slopeErr = 0.0;
  double offset = 0.0;
  double offsetErr = 0.0;
};

struct RelaxationParameters {
  std::vector<RelaxPoint> points;
  std::optional<FitResult> slopeLaw;
  std::optional<FitResult> offsetLaw;
};

RelaxationParameters relaxation_parameters(const std::vector<RelaxSession>& sessions,
                                           const std::vector<double>& tPrimes, bool fitLaws = false);

// Relax-labelled samples after the last manipulation sample, as
// t' = t - t_stop and y = R / R_stop.
struct RelaxSeries {
  double tStop = 0.0;
  double Rstop = 0.0;
  std::vector<double> tPrime;
  std::vector<double> y;
};

RelaxSeries relaxation_series(const ResistanceTrace& trace);

double to_ohmic(double fractionalRate, double R0);

}  // namespace jjtune::fitkit

#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace jjtune::fitkit::detail {

using ResidualFn = std::function<void(const std::vector<double>& p, std::vector<double>& r)>;

struct LmProblem {
  std::size_t nResiduals = 0;
  ResidualFn residual;
  std::vector<double> p0;
  std::vector<double> lower;  // empty: unbounded
  std::vector<double> upper;
  std::vector<bool> fixed;    // empty: all free
};

struct LmOptions {
  int maxIterations = 200;
  double relCostTol = 1e-10;
};

struct LmResult {
  std::vector<double> p;
  std::vector<double> stdErr;  // NaN for fixed or non-estimable parameters
  std::vector<double> residuals;
  double cost = 0.0;  // 0.5 * sum r^2
  int iterations = 0;
  bool converged = false;
  bool singular = false;
};

LmResult levenberg_marquardt(const LmProblem& problem, const LmOptions& options = {});

// Ordinary least squares y ~ X b; X is row-major n x k. Returns b and the
// 1-sigma standard errors (NaN when n == k). Throws DomainError on rank loss.
struct LinearSolution {
  std::vector<double> coef;
  std::vector<double> stdErr;
  std::vector<double> residuals;
};

LinearSolution linear_least_squares(const std::vector<double>& X, std::size_t k, const std::vector<double>& y);

}  // namespace jjtune::fitkit::detail

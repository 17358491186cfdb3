#include "least_squares.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "jjtune/errors.hpp"

namespace jjtune::fitkit::detail {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double half_sum_squares(const std::vector<double>& r) {
  double s = 0.0;
  for (double x : r) s += x * x;
  return 0.5 * s;
}

struct Bounds {
  const LmProblem& pb;
  double lo(std::size_t j) const {
    return pb.lower.empty() ? -std::numeric_limits<double>::infinity() : pb.lower[j];
  }
  double hi(std::size_t j) const {
    return pb.upper.empty() ? std::numeric_limits<double>::infinity() : pb.upper[j];
  }
  double clamp(std::size_t j, double x) const { return std::clamp(x, lo(j), hi(j)); }
};

Eigen::MatrixXd jacobian(const LmProblem& pb, const Bounds& bd, const std::vector<double>& p,
                         const std::vector<std::size_t>& freeIdx) {
  Eigen::MatrixXd J(pb.nResiduals, freeIdx.size());
  std::vector<double> rp(pb.nResiduals), rm(pb.nResiduals);
  for (std::size_t c = 0; c < freeIdx.size(); ++c) {
    const std::size_t j = freeIdx[c];
    const double h = p[j] != 0.0 ? 1e-6 * std::abs(p[j]) : 1e-8;
    auto pp = p;
    auto pm = p;
    pp[j] = std::min(p[j] + h, bd.hi(j));
    pm[j] = std::max(p[j] - h, bd.lo(j));
    pb.residual(pp, rp);
    pb.residual(pm, rm);
    const double span = pp[j] - pm[j];
    for (std::size_t i = 0; i < pb.nResiduals; ++i) J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = (rp[i] - rm[i]) / span;
  }
  return J;
}

}  // namespace

LmResult levenberg_marquardt(const LmProblem& pb, const LmOptions& opt) {
  const std::size_t np = pb.p0.size();
  const Bounds bd{pb};
  std::vector<std::size_t> freeIdx;
  for (std::size_t j = 0; j < np; ++j)
    if (pb.fixed.empty() || !pb.fixed[j]) freeIdx.push_back(j);

  LmResult res;
  res.p = pb.p0;
  for (std::size_t j = 0; j < np; ++j) res.p[j] = bd.clamp(j, res.p[j]);
  res.residuals.resize(pb.nResiduals);
  pb.residual(res.p, res.residuals);
  res.cost = half_sum_squares(res.residuals);

  const auto nf = static_cast<Eigen::Index>(freeIdx.size());
  double lambda = 1e-3;
  std::vector<double> trial(pb.nResiduals);

  if (nf == 0) res.converged = true;
  while (!res.converged && res.iterations < opt.maxIterations) {
    ++res.iterations;
    if (res.cost == 0.0) {
      res.converged = true;
      break;
    }
    const Eigen::MatrixXd J = jacobian(pb, bd, res.p, freeIdx);
    const Eigen::Map<const Eigen::VectorXd> r(res.residuals.data(), static_cast<Eigen::Index>(pb.nResiduals));
    const Eigen::MatrixXd A = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * r;
    Eigen::VectorXd d = A.diagonal();
    for (Eigen::Index i = 0; i < nf; ++i)
      if (!(d(i) > 0.0)) d(i) = 1e-30;

    bool accepted = false;
    while (lambda < 1e20) {
      Eigen::MatrixXd M = A;
      M.diagonal() += lambda * d;
      const Eigen::VectorXd step = M.ldlt().solve(-g);
      auto p = res.p;
      double stepNorm = 0.0;
      double pNorm = 0.0;
      for (Eigen::Index c = 0; c < nf; ++c) {
        const std::size_t j = freeIdx[static_cast<std::size_t>(c)];
        p[j] = bd.clamp(j, p[j] + step(c));
        stepNorm += (p[j] - res.p[j]) * (p[j] - res.p[j]);
        pNorm += res.p[j] * res.p[j];
      }
      if (stepNorm <= 1e-30 * (pNorm + 1e-300)) {
        res.converged = true;
        break;
      }
      pb.residual(p, trial);
      const double c = half_sum_squares(trial);
      if (std::isfinite(c) && c < res.cost) {
        const double rel = (res.cost - c) / res.cost;
        res.p = p;
        res.residuals = trial;
        res.cost = c;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
        if (rel < opt.relCostTol) res.converged = true;
        break;
      }
      lambda *= 10.0;
    }
    // No downhill step at any damping: a minimum to working precision.
    if (!accepted && !res.converged) res.converged = true;
  }

  res.stdErr.assign(np, kNaN);
  const long dof = static_cast<long>(pb.nResiduals) - static_cast<long>(nf);
  if (nf > 0) {
    const Eigen::MatrixXd J = jacobian(pb, bd, res.p, freeIdx);
    const Eigen::MatrixXd A = J.transpose() * J;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    lu.setThreshold(1e-13);
    if (lu.rank() < nf) {
      res.singular = true;
    } else if (dof > 0) {
      const double s2 = 2.0 * res.cost / static_cast<double>(dof);
      const Eigen::MatrixXd cov = s2 * lu.inverse();
      for (Eigen::Index c = 0; c < nf; ++c)
        res.stdErr[freeIdx[static_cast<std::size_t>(c)]] = std::sqrt(std::max(0.0, cov(c, c)));
    }
  }
  return res;
}

LinearSolution linear_least_squares(const std::vector<double>& X, std::size_t k, const std::vector<double>& y) {
  const auto n = static_cast<Eigen::Index>(y.size());
  const auto kk = static_cast<Eigen::Index>(k);
  if (n < kk) throw DomainError("fewer points than coefficients");
  Eigen::MatrixXd A(n, kk);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < kk; ++j) A(i, j) = X[static_cast<std::size_t>(i * kk + j)];
  // Column scaling keeps polynomial designs well conditioned.
  Eigen::VectorXd scale(kk);
  for (Eigen::Index j = 0; j < kk; ++j) {
    const double s = A.col(j).norm();
    scale(j) = s > 0.0 ? s : 1.0;
    A.col(j) /= scale(j);
  }
  const Eigen::Map<const Eigen::VectorXd> b(y.data(), n);
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  qr.setThreshold(1e-12);
  if (qr.rank() < kk) throw DomainError("design matrix is rank deficient");
  const Eigen::VectorXd coefScaled = qr.solve(b);
  const Eigen::VectorXd resid = b - A * coefScaled;

  LinearSolution out;
  out.coef.resize(k);
  out.stdErr.assign(k, std::numeric_limits<double>::quiet_NaN());
  out.residuals.assign(resid.data(), resid.data() + n);
  for (Eigen::Index j = 0; j < kk; ++j) out.coef[static_cast<std::size_t>(j)] = coefScaled(j) / scale(j);
  if (n > kk) {
    const double s2 = resid.squaredNorm() / static_cast<double>(n - kk);
    const Eigen::MatrixXd cov = s2 * (A.transpose() * A).inverse();
    for (Eigen::Index j = 0; j < kk; ++j)
      out.stdErr[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, cov(j, j))) / scale(j);
  }
  return out;
}

}  // namespace jjtune::fitkit::detail

#include <algorithm>
#include <cmath>

#include "jjtune/errors.hpp"
#include "jjtune/twin.hpp"

namespace jjtune::twin {

void RelaxationLaw::validate() const {
  if (slope.a < 1.0) throw DomainError("relaxation slope must start at >= 1");
  if (offset.a < 0.0) throw DomainError("relaxation offset must start at >= 0");
  if (!(slope.tau > 0.0) || !(offset.tau > 0.0)) throw DomainError("relaxation tau must be positive");
  if (!(Tfreeze >= 0.0)) throw DomainError("Tfreeze must be non-negative");
}

void DropModel::validate() const {
  if (!(depth0 >= 0.0)) throw DomainError("drop depth must be non-negative");
  if (!(duration0 >= 0.0)) throw DomainError("drop duration must be non-negative");
  if (!(growth >= 0.0)) throw DomainError("drop growth must be non-negative");
}

void FailureModel::validate() const {
  if (!(earlyRate >= 0.0) || !(lateRate >= 0.0)) throw DomainError("hazard rates must be non-negative");
  if (!(earlyWindow >= 0.0)) throw DomainError("hazard window must be non-negative");
}

void AgingModel::validate() const {
  if (!(cRef >= 0.0)) throw DomainError("aging coefficient must be non-negative");
  if (!(wRef > 0.0) || !(tau > 0.0)) throw DomainError("aging wRef and tau must be positive");
}

void JunctionVariant::validate() const {
  if (!(RW > 0.0)) throw DomainError(name + ": RW must be positive");
  if (!(V0 > 0.0)) throw DomainError(name + ": V0 must be positive");
  if (!(alpha0 >= 0.0)) throw DomainError(name + ": alpha0 must be non-negative");
  if (!(Vbreak > 0.0)) throw DomainError(name + ": Vbreak must be positive");
  if (!(RshortMax > 0.0)) throw DomainError(name + ": RshortMax must be positive");
  if (RA > 0.0 && area > 0.0 && std::abs(RW * area / RA - 1.0) > 0.02)
    throw DomainError(name + ": RA differs from RW * area by more than 2%");
  for (std::size_t i = 1; i < betaTable.size(); ++i)
    if (!(betaTable[i].V > betaTable[i - 1].V)) throw DomainError(name + ": beta table voltages must increase");
  relaxLaw.validate();
  dropModel.validate();
  hazard.validate();
  aging.validate();
  simmons.validate();
}

double JunctionVariant::aging_coefficient() const {
  if (!(width > 0.0)) return aging.cRef;
  return aging.cRef * std::pow(aging.wRef / width, aging.p);
}

double alpha_of_v(const JunctionVariant& v, double V) {
  if (V < 0.0) throw DomainError("alpha(V) takes |V|");
  return v.alpha0 * std::exp(V / v.V0);
}

double beta_of_v(const JunctionVariant& v, double V) {
  const auto& tab = v.betaTable;
  if (tab.empty()) throw ValidationError(v.name + ": empty beta table");
  if (V <= tab.front().V) return tab.front().beta;
  if (V >= tab.back().V) return tab.back().beta;
  const auto hi = std::upper_bound(tab.begin(), tab.end(), V,
                                   [](double x, const BetaKnot& k) { return x < k.V; });
  const auto lo = hi - 1;
  if (V == lo->V) return lo->beta;
  const double w = (V - lo->V) / (hi->V - lo->V);
  return lo->beta + w * (hi->beta - lo->beta);
}

std::optional<double> crossover_time(double alpha, double beta) {
  if (beta >= 0.0) return std::nullopt;
  return alpha / -beta;
}

double delta_r(double R, double R0) {
  if (!(R0 > 0.0)) throw DomainError("R0 must be positive");
  return R / R0 - 1.0;
}

}  // namespace jjtune::twin

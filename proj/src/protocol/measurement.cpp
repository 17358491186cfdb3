#include "jjtune/errors.hpp"
#include "jjtune/protocol.hpp"

namespace jjtune::protocol {

Measurement measure_resistance(const twin::JunctionState& s, const MeasurementSpec& spec, Rng& rng) {
  spec.validate();
  if (s.phase == twin::Phase::Failed) return {s.R, 1.0, true};

  double sumVI = 0.0;
  double sumII = 0.0;
  double sumV = 0.0;
  double sumVV = 0.0;
  std::vector<double> V(static_cast<std::size_t>(spec.points));
  std::vector<double> I(V.size());
  for (std::size_t j = 0; j < V.size(); ++j) {
    V[j] = spec.Vmin + (spec.Vmax - spec.Vmin) * static_cast<double>(j) / static_cast<double>(V.size() - 1);
    const double n = spec.noise > 0.0 ? spec.noise * rng.normal() : 0.0;
    I[j] = V[j] / s.R * (1.0 + n);
    sumVI += V[j] * I[j];
    sumII += I[j] * I[j];
    sumV += V[j];
    sumVV += V[j] * V[j];
  }
  if (sumII == 0.0) throw DomainError("measurement sweep carries no current");
  const double R = sumVI / sumII;
  double ssr = 0.0;
  for (std::size_t j = 0; j < V.size(); ++j) {
    const double r = V[j] - R * I[j];
    ssr += r * r;
  }
  const double n = static_cast<double>(V.size());
  const double sst = sumVV - sumV * sumV / n;
  return {R, sst > 0.0 ? 1.0 - ssr / sst : 1.0, false};
}

}  // namespace jjtune::protocol

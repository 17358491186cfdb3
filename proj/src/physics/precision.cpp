#include "jjtune/errors.hpp"
#include "jjtune/physics.hpp"

namespace jjtune::physics {

namespace {

Hertz f01_at(Ohms R, Hertz EC, Hertz eta, const ConversionParams& conv, BoundMode mode) {
  const Hertz EJ = josephson_energy_from_resistance(R, conv);
  if (mode == BoundMode::FixedChargingEnergy) return f01_from_energies(EJ, EC);
  return f01_from_energies(EJ, charging_energy_from_anharmonicity(eta, EJ));
}

}  // namespace

PrecisionBound frequency_precision_bound(Ohms R, double relErr, Hertz EC, const ConversionParams& conv,
                                         BoundMode mode) {
  if (!(relErr >= 0.0) || relErr >= 1.0) throw DomainError("relative error must lie in [0, 1)");
  if (!(R.value() > 0.0)) throw DomainError("resistance must be positive");
  if (!(EC.value() > 0.0)) throw DomainError("EC must be positive");

  const Hertz eta = anharmonicity_from_energies(EC, josephson_energy_from_resistance(R, conv));
  PrecisionBound b;
  if (relErr == 0.0) {
    b.fHigh = b.fLow = f01_from_resistance(R, EC, conv);
    b.width = Hertz(0.0);
    return b;
  }
  b.fHigh = f01_at(R * (1.0 - relErr), EC, eta, conv, mode);
  b.fLow = f01_at(R * (1.0 + relErr), EC, eta, conv, mode);
  b.width = b.fHigh - b.fLow;
  return b;
}

}  // namespace jjtune::physics

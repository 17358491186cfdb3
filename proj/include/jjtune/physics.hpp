#pragma once

#include <numbers>

#include "jjtune/units.hpp"

// Resistance <-> Josephson energy <-> transmon spectrum, and the Simmons
// temperature correction for in-situ cryogenic resistance readings.
//
// Energies are carried as frequencies (E/h) in Hz throughout. The
// superconducting gap is accepted in eV at the interface.
namespace jjtune::physics {

using units::Amperes;
using units::ElectronVolts;
using units::Hertz;
using units::Kelvin;
using units::Ohms;
using units::Volts;

struct Constants {
  // 2019 SI exact values.
  static constexpr double e = 1.602176634e-19;       // C
  static constexpr double h = 6.62607015e-34;        // J s
  static constexpr double kB = 1.380649e-23;         // J/K
  static constexpr double hbar = h / (2.0 * std::numbers::pi);
  static constexpr double Phi0 = h / (2.0 * e);      // Wb
  static constexpr double alphaBCS = 3.5;            // ideal gap ratio
};

// Settings that turn a room-temperature resistance into a qubit frequency.
struct ConversionParams {
  ElectronVolts gap{174.3e-6};
  Kelvin T{10e-3};
  double ratio = 1.1385;  // R_N / R

  void validate() const;
};

struct TransmonParams {
  Hertz EJ;
  Hertz EC;
  double xi = 0.0;  // sqrt(2 EC / EJ)
  Hertz f01;
  Hertz eta;  // anharmonicity eta / 2pi
  // EJ/EC < 20: the perturbative expansions are stretched. Diagnostic only.
  bool outsideTransmonRegime = false;
};

TransmonParams make_transmon(Hertz EJ, Hertz EC);

struct JunctionElectrical {
  Ohms R;
  double ratio = 1.1385;
  ElectronVolts gap{174.3e-6};
  Kelvin T{10e-3};

  Ohms RN() const { return R * ratio; }
  Amperes IC() const;
};

struct SimmonsParams {
  double G0 = 0.8791;     // normalized, dimensionless
  Kelvin T0{779.5};
  Kelvin Tref{297.0};

  void validate() const;
};

// EJ/h from the critical current: (hbar IC / 2e) / h = IC / (4 pi e).
Hertz josephson_energy(Amperes IC);

// tanh(gap / 2 kB T), with the T -> 0 limit taken as exactly 1.
double gap_tanh_factor(ElectronVolts gap, Kelvin T);

// Ambegaokar-Baratoff critical current.
Amperes critical_current(Ohms RN, ElectronVolts gap, Kelvin T);

Hertz f01_from_energies(Hertz EJ, Hertz EC);
Hertz anharmonicity_from_energies(Hertz EC, Hertz EJ);

// Solves anharmonicity_from_energies(EC, EJ) == eta for EC at fixed EJ.
Hertz charging_energy_from_anharmonicity(Hertz eta, Hertz EJ);

Hertz josephson_energy_from_resistance(Ohms R, const ConversionParams& conv);
Hertz f01_from_resistance(Ohms R, Hertz EC, const ConversionParams& conv);

struct SpectrumSolution {
  Ohms R;
  Hertz EC;
  Hertz EJ;
  Hertz f01Residual;
  Hertz etaResidual;
  int iterations = 0;
};

// Finds (R, EC) reproducing a measured (f01, eta) pair. Searches
// EC in [50, 500] MHz and R in [1, 100] kOhm; throws ConvergenceError otherwise.
SpectrumSolution solve_transmon_from_spectrum(Hertz f01, Hertz eta, const ConversionParams& conv);

enum class BoundMode {
  // The measured anharmonicity is held and EC re-solved at each perturbed R.
  FixedAnharmonicity,
  // EC held at the nominal value.
  FixedChargingEnergy,
};

struct PrecisionBound {
  Hertz fHigh;  // at R (1 - rel_err)
  Hertz fLow;   // at R (1 + rel_err)
  Hertz width;  // fHigh - fLow
};

PrecisionBound frequency_precision_bound(Ohms R, double relErr, Hertz EC, const ConversionParams& conv,
                                         BoundMode mode = BoundMode::FixedAnharmonicity);

Kelvin critical_temperature(ElectronVolts gap);
Volts thermal_voltage(Kelvin T);

double simmons_conductance(Kelvin T, const SimmonsParams& p);
// Cryogenic conductance reading -> room-temperature equivalent at p.Tref.
double room_temperature_equivalent(double Gcryo, Kelvin T, const SimmonsParams& p);
// Factor by which a resistance read at T exceeds its room-temperature value.
double cryogenic_resistance_factor(Kelvin T, const SimmonsParams& p);

}  // namespace jjtune::physics

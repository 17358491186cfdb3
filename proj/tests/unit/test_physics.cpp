#include <cmath>

#include "doctest.h"
#include "jjtune/errors.hpp"
#include "jjtune/physics.hpp"

using namespace jjtune;
using namespace jjtune::physics;
using namespace jjtune::units::literals;

// Reference values come from tests/oracles/frozen_values.py.

TEST_CASE("Ambegaokar-Baratoff critical current") {
  CHECK(critical_current(6286.1_ohm, 174.3_ueV, 10.0_mK).value() == doctest::Approx(4.355479546306143e-08).epsilon(1e-9));
  CHECK(gap_tanh_factor(174.3_ueV, Kelvin(0.0)) == 1.0);
  CHECK(gap_tanh_factor(174.3_ueV, 10.0_mK) == 1.0);
  CHECK(gap_tanh_factor(174.3_ueV, 1.0_K) < 1.0);
  CHECK_THROWS_AS(critical_current(Ohms(-1.0), 174.3_ueV, 10.0_mK), DomainError);
}

TEST_CASE("Josephson energy from critical current") {
  CHECK(josephson_energy(43.56_nA).value() == doctest::Approx(21635533729.431984).epsilon(1e-9));
  CHECK_THROWS_AS(josephson_energy(Amperes(-1e-9)), DomainError);
}

TEST_CASE("transmon spectrum") {
  CHECK(f01_from_energies(9.555_GHz, 186.7_MHz).value() == doctest::Approx(3580619855.6215763).epsilon(1e-10));
  CHECK(anharmonicity_from_energies(250.0_MHz, 10.0_GHz).value() == doctest::Approx(-292736714.99059355).epsilon(1e-10));
  CHECK(f01_from_resistance(5521.4_ohm, 186.7_MHz, {}).value() == doctest::Approx(5490906956.517792).epsilon(1e-10));
  CHECK(make_transmon(1.0_GHz, 186.7_MHz).outsideTransmonRegime);
  CHECK_FALSE(make_transmon(21.6_GHz, 186.7_MHz).outsideTransmonRegime);
}

TEST_CASE("charging energy from anharmonicity inverts the series") {
  const Hertz EJ = 21.63_GHz;
  for (double ec : {120e6, 186.7e6, 260e6}) {
    const Hertz eta = anharmonicity_from_energies(Hertz(ec), EJ);
    CHECK(charging_energy_from_anharmonicity(eta, EJ).value() == doctest::Approx(ec).epsilon(1e-9));
  }
  CHECK_THROWS_AS(charging_energy_from_anharmonicity(Hertz(1e6), EJ), DomainError);
}

TEST_CASE("inverse solve from a measured spectrum") {
  const auto s = solve_transmon_from_spectrum(5.4910_GHz, Hertz(-203.0e6), {});
  CHECK(s.R.value() == doctest::Approx(5521.387796150526).epsilon(1e-9));
  CHECK(s.EC.value() == doctest::Approx(186706123.22547966).epsilon(1e-9));
  CHECK(s.EJ.value() == doctest::Approx(21632948701.389355).epsilon(1e-9));
  CHECK(std::abs(s.f01Residual.value()) < 1e3);
  CHECK_THROWS_AS(solve_transmon_from_spectrum(50.0_GHz, Hertz(-5.0e6), {}), ConvergenceError);
}

TEST_CASE("forward/inverse roundtrip within 1 kHz") {
  for (double R = 3000.0; R <= 20000.0; R += 1700.0) {
    for (double ec = 150e6; ec <= 300e6; ec += 30e6) {
      const Hertz EJ = josephson_energy_from_resistance(Ohms(R), {});
      const auto tp = make_transmon(EJ, Hertz(ec));
      const auto s = solve_transmon_from_spectrum(tp.f01, tp.eta, {});
      CHECK(std::abs(f01_from_resistance(s.R, s.EC, {}).value() - tp.f01.value()) < 1e3);
      CHECK(s.R.value() == doctest::Approx(R).epsilon(1e-6));
    }
  }
}

TEST_CASE("frequency precision bound") {
  const auto b = frequency_precision_bound(5521.4_ohm, 0.0019, 186.7_MHz, {});
  CHECK(b.fHigh.value() == doctest::Approx(5496550237.72607).epsilon(1e-9));
  CHECK(b.fLow.value() == doctest::Approx(5485279728.570542).epsilon(1e-9));
  CHECK(b.width.value() == doctest::Approx(11270509.155528069).epsilon(1e-7));
  const auto fixed = frequency_precision_bound(5521.4_ohm, 0.0019, 186.7_MHz, {}, BoundMode::FixedChargingEnergy);
  CHECK(fixed.width.value() == doctest::Approx(10813793.448967934).epsilon(1e-7));
  CHECK(frequency_precision_bound(5521.4_ohm, 0.0, 186.7_MHz, {}).width.value() == 0.0);
  CHECK_THROWS_AS(frequency_precision_bound(5521.4_ohm, 1.0, 186.7_MHz, {}), DomainError);
  CHECK_THROWS_AS(frequency_precision_bound(5521.4_ohm, -0.1, 186.7_MHz, {}), DomainError);
}

TEST_CASE("precision bound width grows with the relative error") {
  double prev = 0.0;
  for (double e = 0.0005; e < 0.02; e *= 1.5) {
    const double w = frequency_precision_bound(5521.4_ohm, e, 186.7_MHz, {}).width.value();
    CHECK(w > prev);
    prev = w;
  }
}

TEST_CASE("temperature scales") {
  CHECK(critical_temperature(174.3_ueV).value() == doctest::Approx(1.1558100049063882).epsilon(1e-10));
  CHECK(thermal_voltage(297.0_K).value() == doctest::Approx(0.02559347978857118).epsilon(1e-10));
}

TEST_CASE("Simmons correction") {
  SimmonsParams p;
  CHECK(1.0 / p.G0 == doctest::Approx(1.1375).epsilon(1e-4));
  CHECK(room_temperature_equivalent(1.0, 77.0_K, p) == doctest::Approx(1.1341049638639438).epsilon(1e-10));
  CHECK(room_temperature_equivalent(1.0, 297.0_K, p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cryogenic_resistance_factor(297.0_K, p) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(cryogenic_resistance_factor(77.0_K, p) == doctest::Approx(1.1341049638639438).epsilon(1e-10));
  // Conductance is monotone in temperature.
  double prev = 0.0;
  for (double T = 1.0; T < 400.0; T += 13.0) {
    const double g = simmons_conductance(Kelvin(T), p);
    CHECK(g > prev);
    prev = g;
  }
}

TEST_CASE("conversion parameter validation") {
  ConversionParams c;
  c.ratio = 0.0;
  CHECK_THROWS_AS(c.validate(), DomainError);
  ConversionParams g;
  g.gap = ElectronVolts(-1.0);
  CHECK_THROWS_AS(g.validate(), DomainError);
}

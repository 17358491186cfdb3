#include "jjtune/physics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "jjtune/errors.hpp"

namespace jjtune::physics {

namespace {

double xi_of(double EJ, double EC) { return std::sqrt(2.0 * EC / EJ); }

double f01_raw(double EJ, double EC) {
  if (EC == 0.0) return 0.0;
  const double xi = xi_of(EJ, EC);
  return std::sqrt(8.0 * EJ * EC) - EC * (1.0 + xi / 4.0 + 21.0 * xi * xi / 128.0);
}

double eta_raw(double EC, double EJ) {
  const double xi = xi_of(EJ, EC);
  const double xi2 = xi * xi;
  return -EC * (1.0 + 9.0 * xi / 16.0 + 81.0 * xi2 / 128.0 + 3645.0 * xi2 * xi / 4096.0 +
                46899.0 * xi2 * xi2 / 32768.0);
}

// EJ * R is constant for fixed gap, temperature and ratio.
double ej_times_r(const ConversionParams& conv) {
  const Amperes ic = critical_current(Ohms(conv.ratio), conv.gap, conv.T);
  return josephson_energy(ic).value();
}

constexpr double kEcMin = 50e6;
constexpr double kEcMax = 500e6;
constexpr double kRMin = 1e3;
constexpr double kRMax = 100e3;

}  // namespace

void ConversionParams::validate() const {
  if (!(gap.value() > 0.0)) throw DomainError("gap must be positive");
  if (!(T.value() >= 0.0)) throw DomainError("temperature must be non-negative");
  if (!(ratio > 0.0)) throw DomainError("R_N/R ratio must be positive");
}

void SimmonsParams::validate() const {
  if (!(G0 > 0.0)) throw DomainError("Simmons G0 must be positive");
  if (!(T0.value() > 0.0)) throw DomainError("Simmons T0 must be positive");
  if (!(Tref.value() >= 0.0)) throw DomainError("Simmons Tref must be non-negative");
}

TransmonParams make_transmon(Hertz EJ, Hertz EC) {
  if (!(EJ.value() > 0.0) || !(EC.value() > 0.0)) throw DomainError("EJ and EC must be positive");
  TransmonParams p;
  p.EJ = EJ;
  p.EC = EC;
  p.xi = xi_of(EJ.value(), EC.value());
  p.f01 = f01_from_energies(EJ, EC);
  p.eta = anharmonicity_from_energies(EC, EJ);
  p.outsideTransmonRegime = EJ / EC < 20.0;
  return p;
}

Amperes JunctionElectrical::IC() const { return critical_current(RN(), gap, T); }

Hertz josephson_energy(Amperes IC) {
  if (!(IC.value() >= 0.0)) throw DomainError("critical current must be non-negative");
  return Hertz(IC.value() / (4.0 * std::numbers::pi * Constants::e));
}

double gap_tanh_factor(ElectronVolts gap, Kelvin T) {
  if (!(gap.value() > 0.0)) throw DomainError("gap must be positive");
  if (!(T.value() >= 0.0)) throw DomainError("temperature must be non-negative");
  if (T.value() == 0.0) return 1.0;
  const double x = gap.value() * Constants::e / (2.0 * Constants::kB * T.value());
  return std::tanh(x);
}

Amperes critical_current(Ohms RN, ElectronVolts gap, Kelvin T) {
  if (!(RN.value() > 0.0)) throw DomainError("normal-state resistance must be positive");
  const double t = gap_tanh_factor(gap, T);
  // pi * Delta / (2 e R_N) with Delta = gap[eV] * e: the charge cancels.
  return Amperes(std::numbers::pi * gap.value() / (2.0 * RN.value()) * t);
}

Hertz f01_from_energies(Hertz EJ, Hertz EC) {
  if (!(EJ.value() > 0.0)) throw DomainError("EJ must be positive");
  if (!(EC.value() >= 0.0)) throw DomainError("EC must be non-negative");
  return Hertz(f01_raw(EJ.value(), EC.value()));
}

Hertz anharmonicity_from_energies(Hertz EC, Hertz EJ) {
  if (!(EJ.value() > 0.0) || !(EC.value() > 0.0)) throw DomainError("EJ and EC must be positive");
  return Hertz(eta_raw(EC.value(), EJ.value()));
}

Hertz charging_energy_from_anharmonicity(Hertz eta, Hertz EJ) {
  if (!(eta.value() < 0.0)) throw DomainError("anharmonicity must be negative");
  if (!(EJ.value() > 0.0)) throw DomainError("EJ must be positive");
  // Every series term has the sign of -EC, so EC <= |eta|; eta_raw is monotone in EC.
  double lo = 0.0;
  double hi = -eta.value();
  for (int i = 0; i < 200 && hi - lo > 1e-9 * hi; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (eta_raw(mid, EJ.value()) > eta.value()) lo = mid; else hi = mid;
  }
  return Hertz(0.5 * (lo + hi));
}

Hertz josephson_energy_from_resistance(Ohms R, const ConversionParams& conv) {
  if (!(R.value() > 0.0)) throw DomainError("resistance must be positive");
  conv.validate();
  return josephson_energy(critical_current(R * conv.ratio, conv.gap, conv.T));
}

Hertz f01_from_resistance(Ohms R, Hertz EC, const ConversionParams& conv) {
  return f01_from_energies(josephson_energy_from_resistance(R, conv), EC);
}

SpectrumSolution solve_transmon_from_spectrum(Hertz f01, Hertz eta, const ConversionParams& conv) {
  if (!(f01.value() > 0.0)) throw DomainError("f01 must be positive");
  if (!(eta.value() < 0.0)) throw DomainError("anharmonicity must be negative");
  conv.validate();

  const double k = ej_times_r(conv);
  const double f = f01.value();
  const double n = eta.value();

  auto residual = [&](const std::array<double, 2>& x) {
    const double R = std::exp(x[0]);
    const double EC = std::exp(x[1]);
    const double EJ = k / R;
    return std::array<double, 2>{(f01_raw(EJ, EC) - f) / f, (eta_raw(EC, EJ) - n) / -n};
  };
  auto norm = [](const std::array<double, 2>& r) { return std::hypot(r[0], r[1]); };

  // Leading-order start: EC ~ -eta, sqrt(8 EJ EC) ~ f01 + EC.
  const double ec0 = -n;
  const double ej0 = (f + ec0) * (f + ec0) / (8.0 * ec0);
  std::array<double, 2> x{std::log(std::clamp(k / ej0, kRMin, kRMax)),
                          std::log(std::clamp(ec0, kEcMin, kEcMax))};
  auto r = residual(x);

  constexpr double kStep = 1e-6;
  int it = 0;
  for (; it < 100 && norm(r) > 1e-15; ++it) {
    double J[2][2];
    for (int j = 0; j < 2; ++j) {
      auto xp = x;
      auto xm = x;
      xp[j] += kStep;
      xm[j] -= kStep;
      const auto rp = residual(xp);
      const auto rm = residual(xm);
      J[0][j] = (rp[0] - rm[0]) / (2.0 * kStep);
      J[1][j] = (rp[1] - rm[1]) / (2.0 * kStep);
    }
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (det == 0.0 || !std::isfinite(det)) break;
    const std::array<double, 2> dx{-(J[1][1] * r[0] - J[0][1] * r[1]) / det,
                                   -(-J[1][0] * r[0] + J[0][0] * r[1]) / det};
    double lambda = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 40; ++ls, lambda *= 0.5) {
      const std::array<double, 2> xn{x[0] + lambda * dx[0], x[1] + lambda * dx[1]};
      const auto rn = residual(xn);
      if (std::isfinite(rn[0]) && std::isfinite(rn[1]) && norm(rn) < norm(r)) {
        x = xn;
        r = rn;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  SpectrumSolution s;
  s.R = Ohms(std::exp(x[0]));
  s.EC = Hertz(std::exp(x[1]));
  s.EJ = Hertz(k / s.R.value());
  s.f01Residual = Hertz(r[0] * f);
  s.etaResidual = Hertz(r[1] * -n);
  s.iterations = it;

  const double worst = std::max(std::abs(s.f01Residual.value()), std::abs(s.etaResidual.value()));
  const bool inside = s.EC.value() >= kEcMin && s.EC.value() <= kEcMax && s.R.value() >= kRMin &&
                      s.R.value() <= kRMax;
  if (!inside) throw ConvergenceError("no (R, EC) root inside EC 50-500 MHz, R 1-100 kOhm", worst);
  if (worst > 1e3) throw ConvergenceError("transmon inverse solve did not converge", worst);
  return s;
}

Kelvin critical_temperature(ElectronVolts gap) {
  if (!(gap.value() >= 0.0)) throw DomainError("gap must be non-negative");
  return Kelvin(2.0 * gap.value() * Constants::e / (Constants::alphaBCS * Constants::kB));
}

Volts thermal_voltage(Kelvin T) {
  if (!(T.value() >= 0.0)) throw DomainError("temperature must be non-negative");
  return Volts(Constants::kB * T.value() / Constants::e);
}

double simmons_conductance(Kelvin T, const SimmonsParams& p) {
  if (!(T.value() >= 0.0)) throw DomainError("temperature must be non-negative");
  p.validate();
  const double x = T / p.T0;
  return p.G0 * (1.0 + x * x);
}

double cryogenic_resistance_factor(Kelvin T, const SimmonsParams& p) {
  return simmons_conductance(p.Tref, p) / simmons_conductance(T, p);
}

double room_temperature_equivalent(double Gcryo, Kelvin T, const SimmonsParams& p) {
  if (!(Gcryo > 0.0)) throw DomainError("conductance must be positive");
  return Gcryo * cryogenic_resistance_factor(T, p);
}

}  // namespace jjtune::physics

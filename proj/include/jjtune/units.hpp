#pragma once

#include <compare>

namespace jjtune::units {

// Thin dimension tag around a double. Arithmetic is only defined within one
// dimension; anything crossing dimensions goes through .value() on purpose.
template <class Tag>
class Quantity {
 public:
  constexpr Quantity() = default;
  constexpr explicit Quantity(double v) : v_(v) {}

  constexpr double value() const { return v_; }

  constexpr Quantity operator-() const { return Quantity(-v_); }
  constexpr Quantity& operator+=(Quantity o) { v_ += o.v_; return *this; }
  constexpr Quantity& operator-=(Quantity o) { v_ -= o.v_; return *this; }
  constexpr Quantity& operator*=(double s) { v_ *= s; return *this; }

  friend constexpr Quantity operator+(Quantity a, Quantity b) { return Quantity(a.v_ + b.v_); }
  friend constexpr Quantity operator-(Quantity a, Quantity b) { return Quantity(a.v_ - b.v_); }
  friend constexpr Quantity operator*(Quantity a, double s) { return Quantity(a.v_ * s); }
  friend constexpr Quantity operator*(double s, Quantity a) { return Quantity(a.v_ * s); }
  friend constexpr Quantity operator/(Quantity a, double s) { return Quantity(a.v_ / s); }
  friend constexpr double operator/(Quantity a, Quantity b) { return a.v_ / b.v_; }
  friend constexpr auto operator<=>(Quantity a, Quantity b) = default;

 private:
  double v_ = 0.0;
};

struct OhmTag;
struct HertzTag;
struct VoltTag;
struct AmpereTag;
struct KelvinTag;
struct SecondTag;
struct ElectronVoltTag;

using Ohms = Quantity<OhmTag>;
using Hertz = Quantity<HertzTag>;
using Volts = Quantity<VoltTag>;
using Amperes = Quantity<AmpereTag>;
using Kelvin = Quantity<KelvinTag>;
using Seconds = Quantity<SecondTag>;
using ElectronVolts = Quantity<ElectronVoltTag>;

namespace literals {
constexpr Ohms operator""_ohm(long double v) { return Ohms(static_cast<double>(v)); }
constexpr Ohms operator""_kohm(long double v) { return Ohms(static_cast<double>(v) * 1e3); }
constexpr Hertz operator""_Hz(long double v) { return Hertz(static_cast<double>(v)); }
constexpr Hertz operator""_kHz(long double v) { return Hertz(static_cast<double>(v) * 1e3); }
constexpr Hertz operator""_MHz(long double v) { return Hertz(static_cast<double>(v) * 1e6); }
constexpr Hertz operator""_GHz(long double v) { return Hertz(static_cast<double>(v) * 1e9); }
constexpr Volts operator""_V(long double v) { return Volts(static_cast<double>(v)); }
constexpr Volts operator""_mV(long double v) { return Volts(static_cast<double>(v) * 1e-3); }
constexpr Amperes operator""_nA(long double v) { return Amperes(static_cast<double>(v) * 1e-9); }
constexpr Kelvin operator""_K(long double v) { return Kelvin(static_cast<double>(v)); }
constexpr Kelvin operator""_mK(long double v) { return Kelvin(static_cast<double>(v) * 1e-3); }
constexpr ElectronVolts operator""_ueV(long double v) { return ElectronVolts(static_cast<double>(v) * 1e-6); }
}  // namespace literals

}  // namespace jjtune::units

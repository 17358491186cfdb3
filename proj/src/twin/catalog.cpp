#include <stdexcept>

#include "jjtune/errors.hpp"
#include "jjtune/twin.hpp"

namespace jjtune::twin {

namespace {

// beta' in mOhm/s^2 at each voltage, rescaled by RW.
std::vector<BetaKnot> betas(double RW, std::initializer_list<std::pair<double, double>> milliOhm) {
  std::vector<BetaKnot> out;
  for (const auto& [V, b] : milliOhm) out.push_back({V, b * 1e-3 / RW});
  return out;
}

JunctionVariant base(std::string name, double RW, double widthNm, double RAnOhm, double pox, double tox,
                     double Dox, double age, double alpha0PctPerS, double V0mV) {
  JunctionVariant v;
  v.name = std::move(name);
  v.RW = RW;
  v.width = widthNm * 1e-9;
  v.area = v.width * v.width;
  v.RA = RAnOhm * 1e-9;
  v.pox = pox;
  v.tox = tox;
  v.Dox = Dox;
  v.age = age;
  v.alpha0 = alpha0PctPerS * 1e-2;
  v.V0 = V0mV * 1e-3;
  return v;
}

void low_or_medium_dose(JunctionVariant& v) {
  v.dropModel = {0.002, 3.0, 0.5};
  v.hazard = {1e-5, 2e-6, 360.0};
}

void high_dose(JunctionVariant& v) {
  v.dropModel = {0.015, 30.0, 0.5};
  v.hazard = {2e-4, 4e-5, 360.0};
}

}  // namespace

std::vector<JunctionVariant> builtin_variants() {
  std::vector<JunctionVariant> out;

  auto ld1 = base("low-dose-1", 11662, 200, 0.47, 2, 20, 9.4, 182, 824e-9, 72.5);
  ld1.betaTable = betas(ld1.RW, {{0.75, -2.6}, {0.80, -5.7}, {0.85, -8.23}, {0.90, -16.5}, {0.95, -33.0}});
  low_or_medium_dose(ld1);
  out.push_back(ld1);

  auto ld2 = base("low-dose-2", 5513, 300, 0.50, 2, 20, 9.4, 359, 420e-9, 70.4);
  ld2.betaTable = betas(ld2.RW, {{0.75, -0.328}, {0.80, -1.00}, {0.85, -2.46}, {0.90, -4.66}, {0.95, -7.9}});
  low_or_medium_dose(ld2);
  out.push_back(ld2);

  auto md1 = base("medium-dose-1", 11057, 350, 1.35, 10, 60, 38.5, 364, 1002e-9, 91.4);
  md1.betaTable = betas(md1.RW, {{0.90, -2.00}, {0.95, -3.09}, {1.00, -4.71}, {1.05, -4.87}});
  low_or_medium_dose(md1);
  out.push_back(md1);

  auto hd1 = base("high-dose-1", 7840, 318, 0.79, 10, 150, 224.0, 102, 0.79e-9, 57.5);
  hd1.betaTable = betas(hd1.RW, {{0.80, 0.238}, {0.85, 0.259}, {0.90, -0.076}, {0.925, 0.153}, {0.95, -0.162},
                                 {1.00, -0.95}});
  high_dose(hd1);
  out.push_back(hd1);

  auto hd2 = base("high-dose-2", 6281, 354, 0.79, 10, 150, 224.0, 102, 0.37e-9, 55.3);
  hd2.betaTable = betas(hd2.RW, {{0.80, -0.174}, {0.85, 0.185}, {0.90, -0.035}, {0.925, 0.0266},
                                 {0.95, -0.173}, {1.00, -0.217}});
  high_dose(hd2);
  out.push_back(hd2);

  return out;
}

const JunctionVariant& builtin_variant(const std::string& name) {
  static const std::vector<JunctionVariant> all = builtin_variants();
  for (const auto& v : all)
    if (v.name == name) return v;
  throw ValidationError("unknown variant '" + name + "'");
}

}  // namespace jjtune::twin

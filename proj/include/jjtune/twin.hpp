#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "jjtune/physics.hpp"
#include "jjtune/rng.hpp"

// Phenomenological single-junction simulator. All resistance changes are
// fractions of the experiment's starting resistance R0; times are seconds,
// voltages volts, temperatures kelvin.
namespace jjtune::twin {

// y(t) = a + b ln(1 + t / tau)
struct LogGrowth {
  double a = 0.0;
  double b = 0.0;
  double tau = 60.0;

  double operator()(double t) const { return a + b * std::log1p(t / tau); }
};

struct RelaxationLaw {
  // k(30 min) = 1.13 and m(30 min) = 3.29%.
  LogGrowth slope{1.0, 0.13 / std::log(31.0), 60.0};
  LogGrowth offset{0.0, 0.0329 / std::log(31.0), 60.0};
  double Tfreeze = 150.0;

  void validate() const;
};

struct DropModel {
  double depth0 = 0.002;
  double duration0 = 3.0;
  double growth = 0.5;

  void validate() const;
};

struct FailureModel {
  double earlyRate = 0.0;
  double lateRate = 0.0;
  double earlyWindow = 360.0;

  void validate() const;
};

// c(width) ln(1 + t / tau) with c = cRef (wRef / width)^p.
struct AgingModel {
  double cRef = 0.02;
  double wRef = 200e-9;
  double p = 1.0;
  double tau = 86400.0;

  void validate() const;
};

struct BetaKnot {
  double V = 0.0;
  double beta = 0.0;  // fraction / s^2
};

struct JunctionVariant {
  std::string name;
  double RW = 0.0;      // Ohm
  double width = 0.0;   // m
  double area = 0.0;    // m^2
  double RA = 0.0;      // Ohm m^2
  double pox = 0.0;     // mbar
  double tox = 0.0;     // min
  double Dox = 0.0;     // mbar^0.43 min^0.65, metadata only
  double age = 0.0;     // days
  double alpha0 = 0.0;  // fraction / s
  double V0 = 0.0;      // V
  std::vector<BetaKnot> betaTable;
  RelaxationLaw relaxLaw;
  DropModel dropModel;
  FailureModel hazard;
  AgingModel aging;
  physics::SimmonsParams simmons;
  double Vbreak = 1.1;
  double RshortMax = 260.0;

  void validate() const;
  double aging_coefficient() const;
};

enum class Phase { Idle, Drop, Active, Relax, Failed };

const char* to_string(Phase p);

struct RelaxEntry {
  double stopTime = 0.0;
  double dRactiveAtStop = 0.0;
  double increment = 0.0;  // net active change of that step, >= 0
  double warmAge = 0.0;    // time spent above Tfreeze since the stop
};

struct JunctionState {
  double R0 = 0.0;
  double R = 0.0;  // reading at the current temperature
  double dRactive = 0.0;
  Phase phase = Phase::Idle;
  double T = 297.0;
  double clock = 0.0;
  std::vector<RelaxEntry> relaxLedger;
  int stepIndex = 0;

  // Current active step.
  double stepTime = 0.0;
  double stepGrowth = 0.0;
  double stepDropDepth = 0.0;
  double stepDropApplied = 0.0;

  double dropOffset = 0.0;  // <= 0, sum of all drops
  double relaxOffset = 0.0;  // cached relaxation_fraction
  double ageClock = 0.0;
  double ageOffset = 0.0;
};

JunctionState make_state(const JunctionVariant& v, std::optional<double> R0 = std::nullopt,
                         double T = 297.0);

double delta_r(double R, double R0);

double alpha_of_v(const JunctionVariant& v, double V);
double beta_of_v(const JunctionVariant& v, double V);

// Sum of the relaxation contributions of every ledger entry as a fraction of R0.
double relaxation_fraction(const JunctionState& s, const JunctionVariant& v);
// Room-temperature-equivalent resistance.
double resistance_rt(const JunctionState& s);
// Total change of the room-temperature-equivalent resistance relative to R0.
double total_delta_r(const JunctionState& s);

void step_active(JunctionState& s, const JunctionVariant& v, double V, double dt, Rng& rng);
// Closes the current active step and opens its relaxation ledger entry.
void end_active(JunctionState& s, const JunctionVariant& v);
void step_relax(JunctionState& s, const JunctionVariant& v, double dt);
void step_age(JunctionState& s, const JunctionVariant& v, double dt);
// step_relax when a ledger exists, step_age otherwise.
void step_wait(JunctionState& s, const JunctionVariant& v, double dt);
void apply_temperature(JunctionState& s, const JunctionVariant& v, double T);

enum class Breakdown { Safe, Failed };
Breakdown check_breakdown(const JunctionState& s, const JunctionVariant& v, double V);

// alpha / |beta|; nullopt when beta >= 0.
std::optional<double> crossover_time(double alpha, double beta);

// Built-in variants.
std::vector<JunctionVariant> builtin_variants();
const JunctionVariant& builtin_variant(const std::string& name);

}  // namespace jjtune::twin

#include "jjtune/shell/config.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <functional>
#include <map>
#include <set>

#define TOML_EXCEPTIONS 1
#include "toml.hpp"

#include "jjtune/errors.hpp"
#include "jjtune/shell/atomic_file.hpp"

namespace jjtune::shell {

namespace {

const std::set<std::string> kConstants = {"e", "h", "hbar", "kB", "Phi0", "alphaBCS"};

long line_of(const toml::node& n) { return static_cast<long>(n.source().begin.line); }

double number(const toml::node& n, const std::string& key) {
  if (auto d = n.value<double>(); d && (n.is_floating_point() || n.is_integer())) return *d;
  throw ValidationError("'" + key + "' must be a number", line_of(n));
}

std::vector<double> numbers(const toml::node& n, const std::string& key) {
  const auto* arr = n.as_array();
  if (!arr) throw ValidationError("'" + key + "' must be an array of numbers", line_of(n));
  std::vector<double> out;
  for (const auto& el : *arr) out.push_back(number(el, key));
  return out;
}

using Setter = std::function<void(const toml::node&, const std::string&)>;

void apply(const toml::table& tbl, const std::map<std::string, Setter>& setters, const std::string& where) {
  for (const auto& [k, node] : tbl) {
    const std::string key(k.str());
    if (kConstants.count(key)) throw ValidationError("physical constant '" + key + "' cannot be overridden", line_of(node));
    auto it = setters.find(key);
    if (it == setters.end()) throw ValidationError("unknown key '" + key + "' in [" + where + "]", line_of(node));
    it->second(node, key);
  }
}

Setter num(double& target) {
  return [&target](const toml::node& n, const std::string& k) { target = number(n, k); };
}

void read_variant(const toml::table& tbl, twin::JunctionVariant& v) {
  const std::string where = "variant." + v.name;
  std::vector<double> betaV, beta;
  bool haveBetaV = false, haveBeta = false;
  long betaLine = line_of(tbl);

  auto sub = [&](const char* name, std::map<std::string, Setter> setters) -> Setter {
    return [&, name, setters](const toml::node& n, const std::string&) {
      const auto* t = n.as_table();
      if (!t) throw ValidationError(std::string("'") + name + "' must be a table", line_of(n));
      apply(*t, setters, where + "." + name);
    };
  };

  std::map<std::string, Setter> top = {
      {"RW_ohm", num(v.RW)},
      {"width_m", num(v.width)},
      {"area_m2", num(v.area)},
      {"RA_ohm_m2", num(v.RA)},
      {"pox_mbar", num(v.pox)},
      {"tox_min", num(v.tox)},
      {"Dox", num(v.Dox)},
      {"age_days", num(v.age)},
      {"alpha0_per_s", num(v.alpha0)},
      {"V0_V", num(v.V0)},
      {"Vbreak_V", num(v.Vbreak)},
      {"Rshort_max_ohm", num(v.RshortMax)},
      {"beta_V",
       [&](const toml::node& n, const std::string& k) {
         betaV = numbers(n, k);
         haveBetaV = true;
         betaLine = line_of(n);
       }},
      {"beta_per_s2",
       [&](const toml::node& n, const std::string& k) {
         beta = numbers(n, k);
         haveBeta = true;
         betaLine = line_of(n);
       }},
      {"relaxation", sub("relaxation", {{"slope_a", num(v.relaxLaw.slope.a)},
                                        {"slope_b", num(v.relaxLaw.slope.b)},
                                        {"slope_tau_s", num(v.relaxLaw.slope.tau)},
                                        {"offset_a", num(v.relaxLaw.offset.a)},
                                        {"offset_b", num(v.relaxLaw.offset.b)},
                                        {"offset_tau_s", num(v.relaxLaw.offset.tau)},
                                        {"Tfreeze_K", num(v.relaxLaw.Tfreeze)}})},
      {"drop", sub("drop", {{"depth0", num(v.dropModel.depth0)},
                            {"duration_s", num(v.dropModel.duration0)},
                            {"growth", num(v.dropModel.growth)}})},
      {"hazard", sub("hazard", {{"early_rate_per_s", num(v.hazard.earlyRate)},
                                {"late_rate_per_s", num(v.hazard.lateRate)},
                                {"early_window_s", num(v.hazard.earlyWindow)}})},
      {"aging", sub("aging", {{"c_ref", num(v.aging.cRef)},
                              {"w_ref_m", num(v.aging.wRef)},
                              {"p", num(v.aging.p)},
                              {"tau_s", num(v.aging.tau)}})},
      {"simmons", sub("simmons", {{"G0", num(v.simmons.G0)},
                                  {"T0_K",
                                   [&](const toml::node& n, const std::string& k) {
                                     v.simmons.T0 = units::Kelvin(number(n, k));
                                   }},
                                  {"Tref_K", [&](const toml::node& n, const std::string& k) {
                                     v.simmons.Tref = units::Kelvin(number(n, k));
                                   }}})},
  };
  apply(tbl, top, where);

  if (haveBetaV != haveBeta) throw ValidationError("beta_V and beta_per_s2 must be given together", betaLine);
  if (haveBeta) {
    if (betaV.size() != beta.size()) throw ValidationError("beta_V and beta_per_s2 differ in length", betaLine);
    v.betaTable.clear();
    for (std::size_t i = 0; i < beta.size(); ++i) v.betaTable.push_back({betaV[i], beta[i]});
  }
  try {
    v.validate();
  } catch (const DomainError& e) {
    throw ValidationError(where + ": " + e.what(), line_of(tbl));
  } catch (const ValidationError& e) {
    if (e.line() > 0) throw;
    throw ValidationError(where + ": " + e.what(), line_of(tbl));
  }
}

std::string num_text(double x) { return fmt::format("{}", x); }

std::string array_text(const std::vector<double>& xs) {
  std::string out = "[";
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? ", " : "") + num_text(xs[i]);
  return out + "]";
}

}  // namespace

const twin::JunctionVariant& ConfigFile::variant(const std::string& name) const {
  for (const auto& v : variants)
    if (v.name == name) return v;
  throw ValidationError("unknown variant '" + name + "'");
}

ConfigFile builtin_config() {
  ConfigFile cfg;
  cfg.variants = twin::builtin_variants();
  return cfg;
}

ConfigFile parse_config(std::string_view text, std::string_view source) {
  toml::table root;
  try {
    root = toml::parse(text, source);
  } catch (const toml::parse_error& e) {
    throw ValidationError(std::string(e.description()), static_cast<long>(e.source().begin.line));
  }

  ConfigFile cfg;
  const auto builtins = twin::builtin_variants();
  for (const auto& [k, node] : root) {
    const std::string key(k.str());
    if (key == "global") {
      const auto* t = node.as_table();
      if (!t) throw ValidationError("'global' must be a table", line_of(node));
      auto& g = cfg.global;
      apply(*t,
            {{"gap_eV", [&](const toml::node& n, const std::string& kk) { g.conversion.gap = units::ElectronVolts(number(n, kk)); }},
             {"T_K", [&](const toml::node& n, const std::string& kk) { g.conversion.T = units::Kelvin(number(n, kk)); }},
             {"ratio", num(g.conversion.ratio)},
             {"Tref_K", num(g.Tref)}},
            "global");
      try {
        g.conversion.validate();
      } catch (const DomainError& e) {
        throw ValidationError(std::string("global: ") + e.what(), line_of(node));
      }
      if (!(g.Tref > 0.0)) throw ValidationError("global: Tref_K must be positive", line_of(node));
    } else if (key == "variant") {
      const auto* t = node.as_table();
      if (!t) throw ValidationError("'variant' must be a table of variants", line_of(node));
      // Tables iterate in key order; keep the file's order instead.
      std::vector<std::pair<std::string, const toml::node*>> ordered;
      for (const auto& [vk, vnode] : *t) ordered.emplace_back(std::string(vk.str()), &vnode);
      std::stable_sort(ordered.begin(), ordered.end(),
                       [](const auto& x, const auto& y) { return line_of(*x.second) < line_of(*y.second); });
      for (const auto& [vkey, vptr] : ordered) {
        const toml::node& vnode = *vptr;
        const std::string vk = vkey;
        const auto* vt = vnode.as_table();
        if (!vt) throw ValidationError("variant '" + vk + "' must be a table", line_of(vnode));
        twin::JunctionVariant v;
        v.name = vk;
        // Named built-ins start from their shipped values; others from defaults.
        for (const auto& b : builtins)
          if (b.name == v.name) v = b;
        read_variant(*vt, v);
        cfg.variants.push_back(std::move(v));
      }
    } else if (kConstants.count(key)) {
      throw ValidationError("physical constant '" + key + "' cannot be overridden", line_of(node));
    } else {
      throw ValidationError("unknown top-level key '" + key + "'", line_of(node));
    }
  }
  if (cfg.variants.empty()) cfg.variants = builtins;
  return cfg;
}

ConfigFile load_config(const std::filesystem::path& path) { return parse_config(read_file(path), path.string()); }

std::string emit_config(const ConfigFile& cfg) {
  std::string out;
  auto kv = [&out](const char* key, double x) { out += fmt::format("{} = {}\n", key, num_text(x)); };
  out += "[global]\n";
  kv("gap_eV", cfg.global.conversion.gap.value());
  kv("T_K", cfg.global.conversion.T.value());
  kv("ratio", cfg.global.conversion.ratio);
  kv("Tref_K", cfg.global.Tref);
  for (const auto& v : cfg.variants) {
    out += fmt::format("\n[variant.\"{}\"]\n", v.name);
    kv("RW_ohm", v.RW);
    kv("width_m", v.width);
    kv("area_m2", v.area);
    kv("RA_ohm_m2", v.RA);
    kv("pox_mbar", v.pox);
    kv("tox_min", v.tox);
    kv("Dox", v.Dox);
    kv("age_days", v.age);
    kv("alpha0_per_s", v.alpha0);
    kv("V0_V", v.V0);
    kv("Vbreak_V", v.Vbreak);
    kv("Rshort_max_ohm", v.RshortMax);
    std::vector<double> bv, bb;
    for (const auto& k : v.betaTable) {
      bv.push_back(k.V);
      bb.push_back(k.beta);
    }
    out += "beta_V = " + array_text(bv) + "\n";
    out += "beta_per_s2 = " + array_text(bb) + "\n";
    out += fmt::format("\n[variant.\"{}\".relaxation]\n", v.name);
    kv("slope_a", v.relaxLaw.slope.a);
    kv("slope_b", v.relaxLaw.slope.b);
    kv("slope_tau_s", v.relaxLaw.slope.tau);
    kv("offset_a", v.relaxLaw.offset.a);
    kv("offset_b", v.relaxLaw.offset.b);
    kv("offset_tau_s", v.relaxLaw.offset.tau);
    kv("Tfreeze_K", v.relaxLaw.Tfreeze);
    out += fmt::format("\n[variant.\"{}\".drop]\n", v.name);
    kv("depth0", v.dropModel.depth0);
    kv("duration_s", v.dropModel.duration0);
    kv("growth", v.dropModel.growth);
    out += fmt::format("\n[variant.\"{}\".hazard]\n", v.name);
    kv("early_rate_per_s", v.hazard.earlyRate);
    kv("late_rate_per_s", v.hazard.lateRate);
    kv("early_window_s", v.hazard.earlyWindow);
    out += fmt::format("\n[variant.\"{}\".aging]\n", v.name);
    kv("c_ref", v.aging.cRef);
    kv("w_ref_m", v.aging.wRef);
    kv("p", v.aging.p);
    kv("tau_s", v.aging.tau);
    out += fmt::format("\n[variant.\"{}\".simmons]\n", v.name);
    kv("G0", v.simmons.G0);
    kv("T0_K", v.simmons.T0.value());
    kv("Tref_K", v.simmons.Tref.value());
  }
  return out;
}

bool same_variant(const twin::JunctionVariant& a, const twin::JunctionVariant& b) {
  auto law = [](const twin::LogGrowth& x, const twin::LogGrowth& y) { return x.a == y.a && x.b == y.b && x.tau == y.tau; };
  if (a.betaTable.size() != b.betaTable.size()) return false;
  for (std::size_t i = 0; i < a.betaTable.size(); ++i)
    if (a.betaTable[i].V != b.betaTable[i].V || a.betaTable[i].beta != b.betaTable[i].beta) return false;
  return a.name == b.name && a.RW == b.RW && a.width == b.width && a.area == b.area && a.RA == b.RA &&
         a.pox == b.pox && a.tox == b.tox && a.Dox == b.Dox && a.age == b.age && a.alpha0 == b.alpha0 &&
         a.V0 == b.V0 && law(a.relaxLaw.slope, b.relaxLaw.slope) && law(a.relaxLaw.offset, b.relaxLaw.offset) &&
         a.relaxLaw.Tfreeze == b.relaxLaw.Tfreeze && a.dropModel.depth0 == b.dropModel.depth0 &&
         a.dropModel.duration0 == b.dropModel.duration0 && a.dropModel.growth == b.dropModel.growth &&
         a.hazard.earlyRate == b.hazard.earlyRate && a.hazard.lateRate == b.hazard.lateRate &&
         a.hazard.earlyWindow == b.hazard.earlyWindow && a.aging.cRef == b.aging.cRef && a.aging.wRef == b.aging.wRef &&
         a.aging.p == b.aging.p && a.aging.tau == b.aging.tau && a.simmons.G0 == b.simmons.G0 &&
         a.simmons.T0 == b.simmons.T0 && a.simmons.Tref == b.simmons.Tref && a.Vbreak == b.Vbreak &&
         a.RshortMax == b.RshortMax;
}

}  // namespace jjtune::shell

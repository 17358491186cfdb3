#include "jjtune/shell/commands.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <optional>
#include <thread>

#include "CLI11.hpp"

#include "jjtune/digest.hpp"
#include "jjtune/errors.hpp"
#include "jjtune/fitkit.hpp"
#include "jjtune/physics.hpp"
#include "jjtune/planner.hpp"
#include "jjtune/protocol.hpp"
#include "jjtune/shell/atomic_file.hpp"
#include "jjtune/shell/config.hpp"
#include "jjtune/shell/report.hpp"
#include "jjtune/shell/svg.hpp"
#include "jjtune/shell/trace_io.hpp"
#include "jjtune/twin.hpp"

namespace jjtune::shell {

namespace {

namespace fs = std::filesystem;

struct Common {
  std::string variant = "low-dose-1";
  std::string config;
  std::uint64_t seed = 0;
};

void add_common(CLI::App* c, Common& o) {
  c->add_option("--variant", o.variant, "Junction variant name")->capture_default_str();
  c->add_option("--config", o.config, "Variant configuration file (TOML)");
  c->add_option("--seed", o.seed, "Random seed")->capture_default_str();
}

struct Loaded {
  ConfigFile cfg;
  std::string text;  // digest source
};

Loaded load(const std::string& path) {
  if (path.empty()) {
    Loaded l{builtin_config(), {}};
    l.text = emit_config(l.cfg);
    return l;
  }
  std::string text = read_file(path);
  return {parse_config(text, path), text};
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-")
    out << text;
  else
    write_file_atomic(path, text);
}

void check_format(const std::string& format, std::initializer_list<const char*> allowed, const char* command) {
  for (const char* a : allowed)
    if (format == a) return;
  throw ValidationError(fmt::format("{} does not write format '{}'", command, format));
}

void append(ResistanceTrace& into, const ResistanceTrace& part) {
  for (const auto& s : part.samples)
    if (into.samples.empty() || s.t > into.samples.back().t) into.samples.push_back(s);
}

Json trace_json(const ResistanceTrace& trace) {
  Json samples = Json::array();
  for (const auto& s : trace.samples) samples.push_back({s.t, s.R, s.T, to_string(s.phase)});
  Json extra = Json::object();
  for (const auto& [k, v] : trace.meta.extra) extra[k] = v;
  return {{"variant", trace.meta.variant},
          {"program_digest", trace.meta.programDigest},
          {"seed", trace.meta.seed},
          {"extra", extra},
          {"columns", {"time_s", "resistance_ohm", "temperature_K", "phase"}},
          {"samples", samples}};
}

double poly_value(const fitkit::FitResult& f, double t) {
  static const char* names[] = {"alpha", "beta", "gamma"};
  double y = 0.0, tk = t;
  for (std::size_t k = 0; k < f.params.size() && k < 3; ++k, tk *= t) y += f.value(names[k]) * tk;
  return y;
}

double growth_value(const fitkit::FitResult& f, double t) {
  if (f.model == "log-growth") return f.value("a") + f.value("b") * std::log1p(t / f.value("tau"));
  return f.value("a") + f.value("c") * std::pow(t, f.value("d"));
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  Common c;
  double amplitude = 0.85;
  double duration = 300.0;
  std::optional<double> targetDr, stepDr, r0;
  double tRelax = 1800.0;
  double tProbe = 60.0;
  int steps = 27;
  bool noHazard = false;
  std::string plan, out, format = "csv", plot;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out, std::ostream& err) {
  check_format(a.format, {"csv", "json", "svg"}, "simulate");
  const Loaded l = load(a.c.config);
  twin::JunctionVariant v = l.cfg.variant(a.c.variant);
  if (a.noHazard) v.hazard = {};
  Rng rng(a.c.seed);
  twin::JunctionState state = twin::make_state(v, a.r0);

  protocol::IterationSpec it;
  it.Va = a.amplitude;
  ResistanceTrace trace;
  std::string digestSource;

  if (!a.plan.empty()) {
    const std::string text = read_file(a.plan);
    digestSource = text;
    const Json j = Json::parse(text);
    const planner::TuningPlan plan = plan_from_json(j.contains("plan") ? j.at("plan") : j);
    for (const auto& step : plan.steps) {
      it.Va = step.Va;
      auto program = protocol::build_single_program(it, protocol::StopRule::target_delta_r(step.stopTotalDR),
                                                    step.tRelax, a.tProbe);
      append(trace, protocol::run_program(state, v, program, rng));
      if (trace.failed()) break;
    }
    trace.meta.variant = v.name;
    trace.meta.programDigest = "plan:" + hex64(fnv1a(text));
  } else {
    protocol::Program program;
    if (a.stepDr) {
      program = protocol::build_stepped_program(*a.stepDr, a.tRelax, a.steps, it, a.tProbe);
    } else {
      protocol::StopRule stop;
      if (a.targetDr) {
        stop = protocol::StopRule::target_delta_r(*a.targetDr);
      } else {
        if (!(a.duration >= 0.0)) throw ValidationError("--duration must be non-negative");
        const double per = protocol::build_iteration(it).duration();
        stop = protocol::StopRule::max_iterations(static_cast<int>(std::ceil(a.duration / per - 1e-9)));
      }
      program = protocol::build_single_program(it, stop, a.tRelax, a.tProbe);
    }
    trace = protocol::run_program(state, v, program, rng);
    digestSource = program.canonical();
  }
  trace.meta.seed = a.c.seed;

  if (a.format == "csv") {
    emit(a.out, emit_trace(trace), out);
  } else if (a.format == "svg") {
    emit(a.out, render_svg(trace_figure(trace)), out);
  } else {
    Json r = make_report("simulate");
    add_input_digest(r, "config", l.text);
    add_input_digest(r, a.plan.empty() ? "program" : "plan", digestSource);
    r["seed"] = a.c.seed;
    r["failed"] = trace.failed();
    r["final_total_dr"] = trace.samples.empty() ? 0.0 : trace.samples.back().R / state.R0 - 1.0;
    r["trace"] = trace_json(trace);
    emit(a.out, dump_report(r), out);
  }
  if (!a.plot.empty()) write_file_atomic(a.plot, render_svg(trace_figure(trace)));

  if (trace.failed()) {
    err << "junction failed at t = " << format_double(trace.samples.back().t) << " s\n";
    return kExitJunctionFailed;
  }
  return kExitOk;
}

// ---- fit ------------------------------------------------------------------

struct FitArgs {
  std::string in, columns, model = "manipulation", out, format = "json", plot;
  int sustained = 3;
  std::optional<double> normalizeAt;
  double tref = 297.0;
  double epsilon = 5e-4;
};

std::pair<std::vector<double>, std::vector<double>> two_columns(const NumericTable& t, const char* x, const char* y) {
  auto has = [&](const char* n) { return std::find(t.columns.begin(), t.columns.end(), n) != t.columns.end(); };
  if (has(x) && has(y)) return {t.column(x), t.column(y)};
  if (t.columns.size() < 2) throw ValidationError(fmt::format("expected columns '{}' and '{}'", x, y));
  return {t.data[0], t.data[1]};
}

void write_plots(const std::string& dir, const std::vector<std::pair<std::string, Figure>>& figs) {
  if (dir.empty()) return;
  for (const auto& [name, fig] : figs) write_file_atomic(fs::path(dir) / (name + ".svg"), render_svg(fig));
}

int cmd_fit(const FitArgs& a, std::ostream& out) {
  check_format(a.format, {"json", "svg"}, "fit");
  const std::string text = read_file(a.in);
  Json r = make_report("fit");
  add_input_digest(r, "data", text);
  r["model_family"] = a.model;
  std::optional<Figure> primary;

  if (a.model == "manipulation" || a.model == "relaxation") {
    const ResistanceTrace trace = parse_trace(text, ColumnMap::parse(a.columns), a.tref);
    std::vector<double> t, y;
    std::vector<fitkit::FitResult> fits;
    if (a.model == "manipulation") {
      const auto s = fitkit::active_series(trace, a.sustained);
      r["drop"] = {{"duration_s", s.drop.duration},
                   {"depth", s.drop.depth},
                   {"excluded_points", s.drop.excludedPoints}};
      t = s.t;
      y = s.dR;
      fits = {fitkit::fit_poly_time(t, y, 2), fitkit::fit_poly_time(t, y, 3)};
      if (s.drop.excludedPoints > 0)
        for (auto& f : fits) f.notes.push_back("excluded " + std::to_string(s.drop.excludedPoints) + " drop samples");
    } else {
      const auto s = fitkit::relaxation_series(trace);
      r["stop"] = {{"t_s", s.tStop}, {"R_ohm", s.Rstop}};
      t = s.tPrime;
      y = s.y;
      fits = {fitkit::fit_log_growth(t, y, 1.0), fitkit::fit_power_law(t, y, 1.0)};
    }
    const auto cmp = fitkit::compare_models(fits, a.epsilon);
    Json jf = Json::array();
    for (const auto& f : fits) jf.push_back(to_json(f));
    r["fits"] = jf;
    r["comparison"] = to_json(cmp);

    const auto& best = fits[cmp.preferred.value_or(0)];
    std::vector<double> model, resid;
    for (std::size_t i = 0; i < t.size(); ++i) {
      model.push_back(a.model == "manipulation" ? poly_value(best, t[i]) : growth_value(best, t[i]));
      resid.push_back(y[i] - model.back());
    }
    primary = fit_overlay_figure(t, y, model, best.model);
    write_plots(a.plot, {{"trace", trace_figure(trace)},
                         {"fit_overlay", *primary},
                         {"residuals", residual_figure(t, resid)}});
  } else if (a.model == "exponential") {
    const auto [V, alpha] = two_columns(parse_table(text), "voltage_V", "alpha_per_s");
    const auto fit = fitkit::fit_exponential_rate(V, alpha);
    r["fits"] = Json::array({to_json(fit.logSpace), to_json(fit.refined)});
    r["agree"] = fit.agree;
    primary = alpha_semilog_figure(V, alpha, fit.logSpace.value("alpha0"), fit.logSpace.value("V0"));
    write_plots(a.plot, {{"alpha_semilog", *primary}});
  } else if (a.model == "simmons") {
    const auto [T, G] = two_columns(parse_table(text), "temperature_K", "conductance");
    const auto fit = fitkit::fit_simmons(T, G, a.normalizeAt);
    r["fits"] = Json::array({to_json(fit)});
    Figure f{"Conductance vs temperature", "temperature (K)", "conductance", false, {}};
    f.series.push_back({"data", T, G, true});
    primary = f;
    write_plots(a.plot, {{"simmons", f}});
  } else {
    throw ValidationError("unknown model family '" + a.model + "'");
  }

  emit(a.out, a.format == "svg" ? render_svg(*primary) : dump_report(r), out);
  return kExitOk;
}

// ---- plan -----------------------------------------------------------------

struct PlanArgs {
  Common c;
  std::optional<double> targetF, ec, gap, ratio, r0;
  double stepDr = 0.10, tRelax = 10800.0, timeBudget = 600.0, margin = 0.1, horizon = 1800.0, maxDr = 2.7;
  double tProbe = 60.0;
  bool execute = false, noHazard = false;
  std::string out, format = "json", traceOut;
};

std::string plan_csv(const planner::TuningPlan& p) {
  std::string s = "step,Va_V,active_dr,stop_total_dr,t_relax_s,duration_s,extended\n";
  for (std::size_t i = 0; i < p.steps.size(); ++i) {
    const auto& st = p.steps[i];
    s += fmt::format("{},{},{},{},{},{},{}\n", i + 1, format_double(st.Va), format_double(st.activeDR),
                     format_double(st.stopTotalDR), format_double(st.tRelax), format_double(st.duration),
                     st.extended ? "true" : "false");
  }
  return s;
}

int cmd_plan(const PlanArgs& a, std::ostream& out, std::ostream& err) {
  check_format(a.format, {"json", "csv"}, "plan");
  const Loaded l = load(a.c.config);
  twin::JunctionVariant v = l.cfg.variant(a.c.variant);

  planner::TuningTarget target;
  target.fTarget = units::Hertz(a.targetF.value());
  target.EC = units::Hertz(a.ec.value());
  target.gap = a.gap ? units::ElectronVolts(*a.gap) : l.cfg.global.conversion.gap;
  target.ratio = a.ratio.value_or(l.cfg.global.conversion.ratio);
  target.validate();

  planner::PlannerOptions opt;
  opt.timeBudget = a.timeBudget;
  opt.margin = a.margin;
  opt.horizon = a.horizon;
  opt.maxCumulativeDR = a.maxDr;
  const double R0 = a.r0.value_or(v.RW);

  Json r = make_report("plan");
  add_input_digest(r, "config", l.text);
  r["target"] = {{"f_Hz", target.fTarget.value()},
                 {"EC_Hz", target.EC.value()},
                 {"gap_eV", target.gap.value()},
                 {"ratio", target.ratio}};
  r["variant"] = v.name;
  r["R0_ohm"] = R0;
  r["f0_Hz"] = physics::f01_from_resistance(units::Ohms(R0), target.EC, target.conversion()).value();
  r["step_dr"] = a.stepDr;
  r["t_relax_s"] = a.tRelax;

  auto finish = [&](const planner::TuningPlan& plan) {
    emit(a.out, a.format == "csv" ? plan_csv(plan) : dump_report(r), out);
  };

  planner::TuningPlan plan;
  try {
    r["demand_dr"] = planner::required_total_dr(units::Ohms(R0), target);
    plan = planner::plan_steps(units::Ohms(R0), target, v, a.stepDr, a.tRelax, opt);
  } catch (const planner::InfeasiblePlan& e) {
    r["status"] = "infeasible";
    r["error"] = e.what();
    r["plan"] = to_json(e.partial());
    finish(e.partial());
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const InfeasibleError& e) {
    r["status"] = "infeasible";
    r["error"] = e.what();
    finish(plan);
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  }
  r["status"] = "ok";
  r["plan"] = to_json(plan);

  int code = kExitOk;
  if (a.execute) {
    twin::JunctionVariant truth = v;
    if (a.noHazard) truth.hazard = {};
    twin::JunctionState state = twin::make_state(truth, R0);
    Rng rng(a.c.seed);
    planner::ClosedLoopOptions clo;
    clo.planner = opt;
    clo.stepDeltaR = a.stepDr;
    clo.tRelax = a.tRelax;
    clo.tProbe = a.tProbe;
    auto outcome = planner::closed_loop_execute(state, truth, v, target, clo, rng);
    outcome.trace.meta.seed = a.c.seed;
    r["seed"] = a.c.seed;
    r["execution"] = {{"failed", outcome.failed},
                      {"steps_run", outcome.stepsRun},
                      {"achieved_total_dr", outcome.achievedTotalDR},
                      {"achieved_f_Hz", outcome.achievedF.value()},
                      {"residual_Hz", outcome.residual.value()},
                      {"events", outcome.events}};
    if (!a.traceOut.empty()) write_file_atomic(a.traceOut, emit_trace(outcome.trace));
    if (outcome.failed) {
      err << "junction failed during execution\n";
      code = kExitJunctionFailed;
    }
  }
  finish(plan);
  return code;
}

// ---- convert --------------------------------------------------------------

struct ConvertArgs {
  std::string config, out, format = "json";
  std::optional<double> resistance, ec, f01, eta, relErr, gap, ratio;
  double temperature = 297.0;
  std::string mode = "fixed-anharmonicity";
};

void flatten(const Json& j, const std::string& prefix, std::string& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) flatten(v, prefix.empty() ? k : prefix + "." + k, out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "." + std::to_string(i), out);
  } else if (j.is_number_float()) {
    out += prefix + "," + format_double(j.get<double>()) + "\n";
  } else {
    out += prefix + "," + (j.is_string() ? j.get<std::string>() : j.dump()) + "\n";
  }
}

int cmd_convert(const ConvertArgs& a, std::ostream& out) {
  check_format(a.format, {"json", "csv"}, "convert");
  const Loaded l = load(a.config);
  physics::ConversionParams conv = l.cfg.global.conversion;
  if (a.gap) conv.gap = units::ElectronVolts(*a.gap);
  if (a.ratio) conv.ratio = *a.ratio;
  conv.validate();
  physics::BoundMode mode;
  if (a.mode == "fixed-anharmonicity") mode = physics::BoundMode::FixedAnharmonicity;
  else if (a.mode == "fixed-ec") mode = physics::BoundMode::FixedChargingEnergy;
  else throw ValidationError("unknown bound mode '" + a.mode + "'");

  Json r = make_report("convert");
  add_input_digest(r, "config", l.text);
  r["conversion"] = {{"gap_eV", conv.gap.value()}, {"T_K", conv.T.value()}, {"ratio", conv.ratio}};
  r["critical_temperature_K"] = physics::critical_temperature(conv.gap).value();
  r["thermal_voltage"] = {{"T_K", a.temperature},
                          {"V", physics::thermal_voltage(units::Kelvin(a.temperature)).value()}};

  std::optional<double> R, EC;
  if (a.f01 || a.eta) {
    if (!a.f01 || !a.eta) throw ValidationError("--f01 and --eta must be given together");
    const auto s = physics::solve_transmon_from_spectrum(units::Hertz(*a.f01), units::Hertz(*a.eta), conv);
    r["inverse"] = {{"R_ohm", s.R.value()},
                    {"EC_Hz", s.EC.value()},
                    {"EJ_Hz", s.EJ.value()},
                    {"f01_residual_Hz", s.f01Residual.value()},
                    {"eta_residual_Hz", s.etaResidual.value()},
                    {"iterations", s.iterations}};
    R = s.R.value();
    EC = s.EC.value();
  }
  if (a.resistance) {
    R = *a.resistance;
    if (a.ec) EC = *a.ec;
    const units::Ohms Rq(*R);
    physics::JunctionElectrical je{Rq, conv.ratio, conv.gap, conv.T};
    Json fwd = {{"R_ohm", *R},
                {"RN_ohm", je.RN().value()},
                {"IC_A", je.IC().value()},
                {"EJ_Hz", physics::josephson_energy_from_resistance(Rq, conv).value()}};
    if (EC) {
      const auto tp = physics::make_transmon(physics::josephson_energy_from_resistance(Rq, conv), units::Hertz(*EC));
      fwd["EC_Hz"] = *EC;
      fwd["f01_Hz"] = tp.f01.value();
      fwd["eta_Hz"] = tp.eta.value();
      fwd["EJ_over_EC"] = tp.EJ / tp.EC;
      fwd["outside_transmon_regime"] = tp.outsideTransmonRegime;
    }
    r["forward"] = fwd;
  }
  if (a.relErr) {
    if (!R || !EC) throw ValidationError("--rel-err needs a resistance and EC (or --f01/--eta)");
    const auto b = physics::frequency_precision_bound(units::Ohms(*R), *a.relErr, units::Hertz(*EC), conv, mode);
    r["bound"] = {{"rel_err", *a.relErr},
                  {"mode", a.mode},
                  {"f_high_Hz", b.fHigh.value()},
                  {"f_low_Hz", b.fLow.value()},
                  {"width_Hz", b.width.value()}};
  }
  if (a.format == "csv") {
    std::string s = "key,value\n";
    flatten(r, "", s);
    emit(a.out, s, out);
  } else {
    emit(a.out, dump_report(r), out);
  }
  return kExitOk;
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
  Common c;
  std::vector<double> amplitudes;
  double duration = 300.0, tProbe = 60.0;
  std::optional<double> r0;
  int threads = 0;
  bool noHazard = false;
  std::string outDir;
};

struct SweepRow {
  double V = 0.0;
  std::string file;
  bool failed = false;
  std::optional<fitkit::FitResult> fit;
  std::string error;
};

int cmd_sweep(const SweepArgs& a, std::ostream& out, std::ostream& err) {
  const Loaded l = load(a.c.config);
  twin::JunctionVariant v = l.cfg.variant(a.c.variant);
  if (a.noHazard) v.hazard = {};
  std::vector<double> amps = a.amplitudes;
  if (amps.empty())
    for (const auto& k : v.betaTable) amps.push_back(k.V);
  if (amps.empty()) throw ValidationError("no amplitudes given and the variant has no beta table");
  if (a.outDir.empty()) throw ValidationError("sweep needs --out <directory>");
  fs::create_directories(a.outDir);

  std::vector<SweepRow> rows(amps.size());
  std::atomic<std::size_t> next{0};
  // Each amplitude gets its own twin and the seed offset by its index.
  auto worker = [&]() {
    for (std::size_t i; (i = next.fetch_add(1)) < amps.size();) {
      SweepRow& row = rows[i];
      row.V = amps[i];
      try {
        protocol::IterationSpec it;
        it.Va = amps[i];
        const double per = protocol::build_iteration(it).duration();
        auto program = protocol::build_single_program(
            it, protocol::StopRule::max_iterations(static_cast<int>(std::ceil(a.duration / per - 1e-9))), 0.0,
            a.tProbe);
        twin::JunctionState state = twin::make_state(v, a.r0);
        Rng rng(a.c.seed + i);
        ResistanceTrace trace = protocol::run_program(state, v, program, rng);
        trace.meta.seed = a.c.seed + i;
        trace.meta.extra["amplitude_V"] = format_double(amps[i]);
        row.file = fmt::format("trace_{:02d}_{:.0f}mV.csv", i, amps[i] * 1e3);
        write_file_atomic(fs::path(a.outDir) / row.file, emit_trace(trace));
        row.failed = trace.failed();
        if (!row.failed) row.fit = fitkit::fit_poly_time(trace, 2);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n = std::min<std::size_t>(amps.size(), a.threads > 0 ? static_cast<std::size_t>(a.threads) : hw);
  std::vector<std::thread> pool;
  for (std::size_t k = 0; k < n; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  Json r = make_report("sweep");
  add_input_digest(r, "config", l.text);
  r["variant"] = v.name;
  r["seed"] = a.c.seed;
  r["duration_s"] = a.duration;
  Json jr = Json::array();
  std::vector<double> V, alpha;
  bool anyFailed = false;
  for (const auto& row : rows) {
    Json e = {{"V", row.V}, {"file", row.file}, {"failed", row.failed}};
    if (row.fit) {
      e["fit"] = to_json(*row.fit);
      const double al = row.fit->value("alpha");
      if (al > 0.0) {
        V.push_back(row.V);
        alpha.push_back(al);
      }
    }
    if (!row.error.empty()) e["error"] = row.error;
    anyFailed = anyFailed || row.failed || !row.error.empty();
    jr.push_back(e);
  }
  r["runs"] = jr;
  if (V.size() >= 2) {
    const auto fit = fitkit::fit_exponential_rate(V, alpha);
    r["exponential"] = {{"log_space", to_json(fit.logSpace)}, {"refined", to_json(fit.refined)}, {"agree", fit.agree}};
    write_file_atomic(fs::path(a.outDir) / "alpha_semilog.svg",
                      render_svg(alpha_semilog_figure(V, alpha, fit.logSpace.value("alpha0"), fit.logSpace.value("V0"))));
  }
  write_file_atomic(fs::path(a.outDir) / "sweep.json", dump_report(r));
  out << "wrote " << rows.size() << " traces to " << a.outDir << "\n";
  if (anyFailed) {
    err << "at least one sweep run failed; see sweep.json\n";
    return kExitJunctionFailed;
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Josephson junction resistance tuning toolkit", "jjtune"};
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Run a manipulation program on a junction twin");
  add_common(s, sim.c);
  s->add_option("--amplitude", sim.amplitude, "Pulse amplitude Va (V)")->capture_default_str();
  s->add_option("--duration", sim.duration, "Manipulation time for a single program (s)")->capture_default_str();
  s->add_option("--target-dr", sim.targetDr, "Stop at this total fractional change instead of --duration");
  s->add_option("--step-dr", sim.stepDr, "Stepped program: fractional change per step");
  s->add_option("--steps", sim.steps, "Stepped program: number of steps")->capture_default_str();
  s->add_option("--t-relax", sim.tRelax, "Relaxation after each stop (s)")->capture_default_str();
  s->add_option("--t-probe", sim.tProbe, "Probe period during relaxation (s)")->capture_default_str();
  s->add_option("--r0", sim.r0, "Initial resistance (Ohm), default the variant's RW");
  s->add_option("--plan", sim.plan, "Execute the steps of a plan report");
  s->add_flag("--no-hazard", sim.noHazard, "Disable random breakdown");
  s->add_option("--out", sim.out, "Output file (default stdout)");
  s->add_option("--format", sim.format, "csv, json or svg")->capture_default_str();
  s->add_option("--plot", sim.plot, "Also write the trace as SVG to this file");

  FitArgs fit;
  auto* f = app.add_subcommand("fit", "Fit resistance models to a trace or table");
  f->add_option("--in", fit.in, "Input CSV")->required();
  f->add_option("--model", fit.model, "manipulation, relaxation, exponential or simmons")->capture_default_str();
  f->add_option("--columns", fit.columns, "Column mapping, e.g. time=t_min,resistance=R,time_scale=60");
  f->add_option("--sustained", fit.sustained, "Consecutive rises that end the drop")->capture_default_str();
  f->add_option("--epsilon", fit.epsilon, "RMSE tie margin for model selection")->capture_default_str();
  f->add_option("--normalize-at", fit.normalizeAt, "Simmons: normalize conductance at this temperature (K)");
  f->add_option("--tref", fit.tref, "Temperature for samples without one (K)")->capture_default_str();
  f->add_option("--out", fit.out, "Output file (default stdout)");
  f->add_option("--format", fit.format, "json or svg")->capture_default_str();
  f->add_option("--plot", fit.plot, "Directory for trace/fit/residual SVGs");

  PlanArgs plan;
  auto* p = app.add_subcommand("plan", "Plan a tuning sequence for a target frequency");
  add_common(p, plan.c);
  p->add_option("--target-f", plan.targetF, "Target qubit frequency (Hz)")->required();
  p->add_option("--ec", plan.ec, "Charging energy EC/h (Hz)")->required();
  p->add_option("--gap", plan.gap, "Superconducting gap (eV)");
  p->add_option("--ratio", plan.ratio, "R_N / R");
  p->add_option("--r0", plan.r0, "Current resistance (Ohm), default the variant's RW");
  p->add_option("--step-dr", plan.stepDr, "Grid step of the cumulative change")->capture_default_str();
  p->add_option("--t-relax", plan.tRelax, "Relaxation between steps (s)")->capture_default_str();
  p->add_option("--time-budget", plan.timeBudget, "Active time per step (s)")->capture_default_str();
  p->add_option("--margin", plan.margin, "Voltage margin below breakdown (V)")->capture_default_str();
  p->add_option("--horizon", plan.horizon, "Settling horizon after the last stop (s)")->capture_default_str();
  p->add_option("--max-dr", plan.maxDr, "Largest cumulative change allowed")->capture_default_str();
  p->add_option("--t-probe", plan.tProbe, "Probe period while executing (s)")->capture_default_str();
  p->add_flag("--execute", plan.execute, "Run the plan closed-loop on a twin");
  p->add_flag("--no-hazard", plan.noHazard, "Disable random breakdown when executing");
  p->add_option("--trace-out", plan.traceOut, "Trace CSV of the executed plan");
  p->add_option("--out", plan.out, "Output file (default stdout)");
  p->add_option("--format", plan.format, "json or csv")->capture_default_str();

  ConvertArgs conv;
  auto* c = app.add_subcommand("convert", "Resistance, frequency and temperature conversions");
  c->add_option("--config", conv.config, "Configuration file for physics defaults");
  c->add_option("--resistance", conv.resistance, "Room-temperature resistance (Ohm)");
  c->add_option("--ec", conv.ec, "Charging energy EC/h (Hz)");
  c->add_option("--f01", conv.f01, "Measured qubit frequency (Hz)");
  c->add_option("--eta", conv.eta, "Measured anharmonicity (Hz, negative)");
  c->add_option("--rel-err", conv.relErr, "Relative resistance uncertainty for the frequency bound");
  c->add_option("--mode", conv.mode, "fixed-anharmonicity or fixed-ec")->capture_default_str();
  c->add_option("--gap", conv.gap, "Superconducting gap (eV)");
  c->add_option("--ratio", conv.ratio, "R_N / R");
  c->add_option("--temperature", conv.temperature, "Temperature for the thermal voltage (K)")->capture_default_str();
  c->add_option("--out", conv.out, "Output file (default stdout)");
  c->add_option("--format", conv.format, "json or csv")->capture_default_str();

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "Amplitude sweep over independent twins");
  add_common(w, sw.c);
  w->add_option("--amplitudes", sw.amplitudes, "Amplitudes (V), default the variant's beta-table voltages")
      ->delimiter(',');
  w->add_option("--duration", sw.duration, "Manipulation time per amplitude (s)")->capture_default_str();
  w->add_option("--t-probe", sw.tProbe, "Probe period (s)")->capture_default_str();
  w->add_option("--r0", sw.r0, "Initial resistance (Ohm)");
  w->add_option("--threads", sw.threads, "Worker threads, 0 = hardware")->capture_default_str();
  w->add_flag("--no-hazard", sw.noHazard, "Disable random breakdown");
  w->add_option("--out", sw.outDir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*s) return cmd_simulate(sim, out, err);
    if (*f) return cmd_fit(fit, out);
    if (*p) return cmd_plan(plan, out, err);
    if (*c) return cmd_convert(conv, out);
    if (*w) return cmd_sweep(sw, out, err);
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    err << "error: malformed JSON input: " << e.what() << "\n";
    return kExitValidation;
  } catch (const InfeasibleError& e) {
    err << "infeasible: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const ConvergenceError& e) {
    err << "no solution: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
  return kExitInternal;
}

}  // namespace jjtune::shell

#include "jjtune/shell/report.hpp"

#include <cmath>
#include <limits>

#include "jjtune/digest.hpp"

#ifndef JJTUNE_VERSION
#define JJTUNE_VERSION "0.0.0"
#endif

namespace jjtune::shell {

namespace {

Json number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

double read_number(const Json& j) {
  return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>();
}

}  // namespace

const char* tool_version() { return JJTUNE_VERSION; }

Json make_report(const std::string& command) {
  Json r;
  r["schema_version"] = kSchemaVersion;
  r["tool"] = {{"name", "jjtune"}, {"version", tool_version()}};
  r["command"] = command;
  r["inputs"] = Json::object();
  return r;
}

void add_input_digest(Json& report, const std::string& name, std::string_view content) {
  report["inputs"][name] = "fnv1a64:" + hex64(fnv1a(content));
}

std::string dump_report(const Json& report) { return report.dump(2) + "\n"; }

Json to_json(const fitkit::FitResult& fit) {
  Json params = Json::array();
  for (const auto& p : fit.params)
    params.push_back({{"name", p.name},
                      {"value", number(p.value)},
                      {"std_err", number(p.stdErr)},
                      {"at_bound", p.atBound},
                      {"identifiable", p.identifiable}});
  return {{"model", fit.model},
          {"params", params},
          {"rmse", number(fit.rmse)},
          {"resid_mean", number(fit.residMean)},
          {"resid_var", number(fit.residVar)},
          {"n_points", fit.nPoints},
          {"converged", fit.converged},
          {"notes", fit.notes}};
}

fitkit::FitResult fit_from_json(const Json& j) {
  fitkit::FitResult f;
  f.model = j.at("model").get<std::string>();
  for (const auto& p : j.at("params"))
    f.params.push_back({p.at("name").get<std::string>(), read_number(p.at("value")), read_number(p.at("std_err")),
                        p.at("at_bound").get<bool>(), p.at("identifiable").get<bool>()});
  f.rmse = read_number(j.at("rmse"));
  f.residMean = read_number(j.at("resid_mean"));
  f.residVar = read_number(j.at("resid_var"));
  f.nPoints = j.at("n_points").get<std::size_t>();
  f.converged = j.at("converged").get<bool>();
  f.notes = j.at("notes").get<std::vector<std::string>>();
  return f;
}

Json to_json(const fitkit::ModelComparison& cmp) {
  Json rows = Json::array();
  for (const auto& r : cmp.rows)
    rows.push_back({{"model", r.model},
                    {"n_params", r.nParams},
                    {"rmse", number(r.rmse)},
                    {"resid_mean", number(r.residMean)},
                    {"resid_var", number(r.residVar)},
                    {"included", r.included}});
  return {{"rows", rows},
          {"preferred", cmp.preferred ? Json(cmp.rows[*cmp.preferred].model) : Json(nullptr)},
          {"notes", cmp.notes}};
}

Json to_json(const planner::TuningPlan& plan) {
  Json steps = Json::array();
  for (const auto& s : plan.steps)
    steps.push_back({{"Va_V", number(s.Va)},
                     {"active_dr", number(s.activeDR)},
                     {"stop_total_dr", number(s.stopTotalDR)},
                     {"t_relax_s", number(s.tRelax)},
                     {"duration_s", number(s.duration)},
                     {"extended", s.extended}});
  return {{"calibration", plan.calibration},
          {"steps", steps},
          {"predicted_total_dr", number(plan.predictedTotalDR)},
          {"predicted_active_dr", number(plan.predictedActiveDR)},
          {"predicted_f_Hz", number(plan.predictedF.value())},
          {"budget",
           {{"offset_sigma", number(plan.budget.offsetSigma)},
            {"slope_sigma", number(plan.budget.slopeSigma)},
            {"f_sigma_Hz", number(plan.budget.fSigma.value())}}},
          {"safety_margin_V", number(plan.safetyMargin)},
          {"horizon_s", number(plan.horizon)},
          {"warnings", plan.warnings}};
}

planner::TuningPlan plan_from_json(const Json& j) {
  planner::TuningPlan p;
  p.calibration = j.at("calibration").get<std::string>();
  for (const auto& s : j.at("steps"))
    p.steps.push_back({read_number(s.at("Va_V")), read_number(s.at("active_dr")), read_number(s.at("stop_total_dr")),
                       read_number(s.at("t_relax_s")), read_number(s.at("duration_s")), s.at("extended").get<bool>()});
  p.predictedTotalDR = read_number(j.at("predicted_total_dr"));
  p.predictedActiveDR = read_number(j.at("predicted_active_dr"));
  p.predictedF = units::Hertz(read_number(j.at("predicted_f_Hz")));
  const auto& b = j.at("budget");
  p.budget.offsetSigma = read_number(b.at("offset_sigma"));
  p.budget.slopeSigma = read_number(b.at("slope_sigma"));
  p.budget.fSigma = units::Hertz(read_number(b.at("f_sigma_Hz")));
  p.safetyMargin = read_number(j.at("safety_margin_V"));
  p.horizon = read_number(j.at("horizon_s"));
  p.warnings = j.at("warnings").get<std::vector<std::string>>();
  return p;
}

}  // namespace jjtune::shell

#pragma once

#include <string>

#include "json.hpp"

#include "jjtune/fitkit.hpp"
#include "jjtune/planner.hpp"

namespace jjtune::shell {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

const char* tool_version();

// Skeleton every report starts from: schema version, tool, command, inputs.
Json make_report(const std::string& command);
void add_input_digest(Json& report, const std::string& name, std::string_view content);

// Non-finite numbers are written as null and read back as NaN.
std::string dump_report(const Json& report);

Json to_json(const fitkit::FitResult& fit);
fitkit::FitResult fit_from_json(const Json& j);

Json to_json(const fitkit::ModelComparison& cmp);

Json to_json(const planner::TuningPlan& plan);
planner::TuningPlan plan_from_json(const Json& j);

}  // namespace jjtune::shell

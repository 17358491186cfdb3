#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "jjtune/trace.hpp"

namespace jjtune::shell {

// Source column names and unit scales for non-native CSV layouts.
struct ColumnMap {
  std::string time = "time_s";
  std::string resistance = "resistance_ohm";
  std::string temperature = "temperature_K";
  std::string phase = "phase";
  double timeScale = 1.0;        // multiplies the time column to get seconds
  double resistanceScale = 1.0;  // multiplies the resistance column to get Ohm

  // "time=t_min,resistance=R,time_scale=60"; unnamed keys keep their defaults.
  static ColumnMap parse(std::string_view spec);
};

// Samples without a temperature column get Tref; without a phase column, "active".
ResistanceTrace parse_trace(std::string_view text, const ColumnMap& map = {}, double Tref = 297.0);
ResistanceTrace ingest_trace(const std::filesystem::path& path, const ColumnMap& map = {}, double Tref = 297.0);

std::string emit_trace(const ResistanceTrace& trace);

// Header plus all-numeric rows; '#' lines are skipped.
struct NumericTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> data;  // one vector per column

  const std::vector<double>& column(const std::string& name) const;
};

NumericTable parse_table(std::string_view text);

// Shortest round-trip decimal form.
std::string format_double(double x);

}  // namespace jjtune::shell

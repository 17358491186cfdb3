#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "jjtune/physics.hpp"
#include "jjtune/twin.hpp"

namespace jjtune::shell {

struct GlobalConfig {
  physics::ConversionParams conversion;
  double Tref = 297.0;  // K, reference temperature for ingest and Simmons

  bool operator==(const GlobalConfig& o) const {
    return conversion.gap == o.conversion.gap && conversion.T == o.conversion.T &&
           conversion.ratio == o.conversion.ratio && Tref == o.Tref;
  }
};

// [global] plus one [variant.<name>] table per junction variant.
struct ConfigFile {
  GlobalConfig global;
  std::vector<twin::JunctionVariant> variants;

  const twin::JunctionVariant& variant(const std::string& name) const;
};

ConfigFile builtin_config();

// Throws ValidationError (with the offending line where known) on unknown
// keys, attempts to override physical constants, or invalid values.
ConfigFile parse_config(std::string_view text, std::string_view source = "config");
ConfigFile load_config(const std::filesystem::path& path);

std::string emit_config(const ConfigFile& cfg);

bool same_variant(const twin::JunctionVariant& a, const twin::JunctionVariant& b);

}  // namespace jjtune::shell

#include "jjtune/shell/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <optional>
#include <vector>

#include "jjtune/errors.hpp"
#include "jjtune/shell/atomic_file.hpp"

namespace jjtune::shell {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    out.push_back(trim(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_number(std::string_view s, long line, const char* what) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
    throw ValidationError(std::string("malformed ") + what + " '" + std::string(s) + "'", line);
  return x;
}

}  // namespace

ColumnMap ColumnMap::parse(std::string_view spec) {
  ColumnMap m;
  if (trim(spec).empty()) return m;
  for (auto item : split(spec, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw ValidationError("column mapping entry '" + std::string(item) + "' lacks '='");
    const std::string key(trim(item.substr(0, eq)));
    const std::string val(trim(item.substr(eq + 1)));
    if (key == "time") m.time = val;
    else if (key == "resistance") m.resistance = val;
    else if (key == "temperature") m.temperature = val;
    else if (key == "phase") m.phase = val;
    else if (key == "time_scale") m.timeScale = parse_number(val, 0, "time scale");
    else if (key == "resistance_scale") m.resistanceScale = parse_number(val, 0, "resistance scale");
    else throw ValidationError("unknown column mapping key '" + key + "'");
  }
  if (!(m.timeScale > 0.0) || !(m.resistanceScale > 0.0)) throw ValidationError("column scales must be positive");
  return m;
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  (void)ec;
  return std::string(buf, ptr);
}

ResistanceTrace parse_trace(std::string_view text, const ColumnMap& map, double Tref) {
  ResistanceTrace trace;
  std::optional<std::size_t> ct, cr, cT, cp;
  std::size_t ncols = 0;
  bool haveHeader = false;
  long lineNo = 0;
  std::size_t pos = 0;

  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) {
      if (nl == text.size()) break;
      continue;
    }

    if (line.front() == '#') {
      auto body = trim(line.substr(1));
      const auto colon = body.find(':');
      if (colon != std::string_view::npos) {
        const std::string key(trim(body.substr(0, colon)));
        const std::string val(trim(body.substr(colon + 1)));
        if (key == "variant") trace.meta.variant = val;
        else if (key == "program_digest") trace.meta.programDigest = val;
        else if (key == "seed") {
          const auto [ptr, ec] = std::from_chars(val.data(), val.data() + val.size(), trace.meta.seed);
          if (ec != std::errc() || ptr != val.data() + val.size()) throw ValidationError("malformed seed", lineNo);
        }
        else trace.meta.extra[key] = val;
      }
      continue;
    }

    const auto fields = split(line, ',');
    if (!haveHeader) {
      for (std::size_t i = 0; i < fields.size(); ++i) {
        if (fields[i] == map.time) ct = i;
        else if (fields[i] == map.resistance) cr = i;
        else if (fields[i] == map.temperature) cT = i;
        else if (fields[i] == map.phase) cp = i;
      }
      if (!ct) throw ValidationError("header lacks time column '" + map.time + "'", lineNo);
      if (!cr) throw ValidationError("header lacks resistance column '" + map.resistance + "'", lineNo);
      ncols = fields.size();
      haveHeader = true;
      continue;
    }

    if (fields.size() != ncols)
      throw ValidationError("expected " + std::to_string(ncols) + " fields, found " + std::to_string(fields.size()),
                            lineNo);
    TraceSample s;
    s.t = parse_number(fields[*ct], lineNo, "time") * map.timeScale;
    s.R = parse_number(fields[*cr], lineNo, "resistance") * map.resistanceScale;
    s.T = cT ? parse_number(fields[*cT], lineNo, "temperature") : Tref;
    if (cp) {
      try {
        s.phase = parse_phase_label(std::string(fields[*cp]));
      } catch (const ValidationError& e) {
        throw ValidationError(e.what(), lineNo);
      }
    }
    if (!std::isfinite(s.t)) throw ValidationError("time must be finite", lineNo);
    if (!trace.samples.empty() && !(s.t > trace.samples.back().t))
      throw ValidationError("time is not strictly increasing", lineNo);
    if (s.phase != PhaseLabel::Failed && !(s.R > 0.0)) throw ValidationError("resistance must be positive", lineNo);
    if (!(s.T > 0.0)) throw ValidationError("temperature must be positive", lineNo);
    trace.samples.push_back(s);
    if (nl == text.size()) break;
  }
  if (!haveHeader) throw ValidationError("missing header row");
  return trace;
}

ResistanceTrace ingest_trace(const std::filesystem::path& path, const ColumnMap& map, double Tref) {
  return parse_trace(read_file(path), map, Tref);
}

std::string emit_trace(const ResistanceTrace& trace) {
  std::string out;
  if (!trace.meta.variant.empty()) out += "# variant: " + trace.meta.variant + "\n";
  if (!trace.meta.programDigest.empty()) out += "# program_digest: " + trace.meta.programDigest + "\n";
  out += "# seed: " + std::to_string(trace.meta.seed) + "\n";
  for (const auto& [k, v] : trace.meta.extra) out += "# " + k + ": " + v + "\n";
  out += "time_s,resistance_ohm,temperature_K,phase\n";
  for (const auto& s : trace.samples) {
    out += format_double(s.t);
    out += ',';
    out += format_double(s.R);
    out += ',';
    out += format_double(s.T);
    out += ',';
    out += to_string(s.phase);
    out += '\n';
  }
  return out;
}

const std::vector<double>& NumericTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return data[i];
  throw ValidationError("missing column '" + name + "'");
}

NumericTable parse_table(std::string_view text) {
  NumericTable tab;
  long lineNo = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    const std::string_view line = trim(text.substr(pos, nl - pos));
    pos = nl + 1;
    ++lineNo;
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line, ',');
    if (tab.columns.empty()) {
      for (auto f : fields) tab.columns.emplace_back(f);
      tab.data.resize(fields.size());
      continue;
    }
    if (fields.size() != tab.columns.size())
      throw ValidationError("expected " + std::to_string(tab.columns.size()) + " fields, found " +
                                std::to_string(fields.size()),
                            lineNo);
    for (std::size_t i = 0; i < fields.size(); ++i) tab.data[i].push_back(parse_number(fields[i], lineNo, "value"));
  }
  if (tab.columns.empty()) throw ValidationError("missing header row");
  return tab;
}

}  // namespace jjtune::shell

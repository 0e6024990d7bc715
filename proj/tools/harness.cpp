#include "harness.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include "dioph/errors.hpp"
#include "json.hpp"

namespace dtk {

using dioph::ErrorKind;
using dioph::fail;

const std::vector<Param>& common_params() {
  static const std::vector<Param> params = {
      {"format", "csv", "output format: csv or json"},
      {"max_scan_steps", "100000000", "budget: q-scan steps"},
      {"max_cells", "100000000", "budget: enumeration cells"},
  };
  return params;
}

const Command* find_command(const std::string& name) {
  for (const Command& c : commands())
    if (c.name == name) return &c;
  return nullptr;
}

Config resolve(const Command& cmd, const Config& file_values, const Config& flags) {
  std::set<std::string> known;
  Config out;
  auto add = [&](const Param& p) {
    known.insert(p.name);
    if (!p.fallback.empty()) out[p.name] = p.fallback;
  };
  for (const Param& p : common_params()) add(p);
  for (const Param& p : cmd.params) add(p);
  for (const Config* src : {&file_values, &flags})
    for (const auto& [k, v] : *src) {
      if (k == "command") {
        if (v != cmd.name) fail(ErrorKind::Parse, "config is for command '" + v + "', not '" + cmd.name + "'");
        continue;
      }
      if (!known.count(k)) fail(ErrorKind::Parse, "unknown key '" + k + "' for command " + cmd.name);
      out[k] = v;
    }
  out["command"] = cmd.name;
  for (const Param& p : cmd.params)
    if (p.required && !out.count(p.name)) fail(ErrorKind::Parse, "missing required --" + p.name);
  const std::string& f = out.at("format");
  if (f != "csv" && f != "json") fail(ErrorKind::Parse, "format must be csv or json, got '" + f + "'");
  return out;
}

Config config_from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::Parse, std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) fail(ErrorKind::Parse, "config must be a JSON object");
  Config out;
  for (const auto& [k, v] : j.items()) {
    if (v.is_string()) out[k] = v.get<std::string>();
    else if (v.is_number() || v.is_boolean()) out[k] = v.dump();
    else fail(ErrorKind::Parse, "config value for '" + k + "' must be a string, number or boolean");
  }
  return out;
}

std::string config_echo(const Config& cfg) {
  nlohmann::json j(cfg);
  return j.dump();
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// Recorded version and config echo of a result file.
std::pair<std::string, Config> recorded_run(const std::string& bytes) {
  if (!bytes.empty() && bytes[0] == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(bytes);
    } catch (const nlohmann::json::exception& e) {
      fail(ErrorKind::Parse, std::string("result file is not valid JSON: ") + e.what());
    }
    if (!j.contains("config")) fail(ErrorKind::Parse, "result file has no config echo");
    return {j.value("version", ""), config_from_json_text(j["config"].dump())};
  }
  std::string version, config;
  std::istringstream in(bytes);
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("# dtk ", 0) == 0) version = line.substr(6);
    if (line.rfind("# config ", 0) == 0) config = line.substr(9);
  }
  if (config.empty()) fail(ErrorKind::Parse, "result file has no config echo");
  return {version, config_from_json_text(config)};
}

std::size_t first_difference_line(const std::string& a, const std::string& b) {
  std::size_t line = 1;
  for (std::size_t i = 0; i < std::min(a.size(), b.size()); ++i) {
    if (a[i] != b[i]) return line;
    if (a[i] == '\n') ++line;
  }
  return line;
}

}  // namespace

std::string render(const Config& cfg, const Result& r) {
  std::ostringstream os;
  if (cfg.at("format") == "json") {
    nlohmann::json j;
    j["version"] = DIOPH_VERSION;
    j["config"] = cfg;
    j["summary"] = r.summary;
    j["table"]["columns"] = r.table.columns;
    j["table"]["rows"] = r.table.rows;
    os << j.dump(2) << '\n';
    return os.str();
  }
  os << "# dtk " << DIOPH_VERSION << '\n';
  os << "# config " << config_echo(cfg) << '\n';
  for (const auto& [k, v] : r.summary) os << "# " << k << '=' << v << '\n';
  for (std::size_t i = 0; i < r.table.columns.size(); ++i) os << (i ? "," : "") << csv_field(r.table.columns[i]);
  os << '\n';
  for (const auto& row : r.table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_field(row[i]);
    os << '\n';
  }
  return os.str();
}

std::vector<std::string> config_diff(const Config& recorded, const Config& current) {
  std::vector<std::string> out;
  for (const auto& [k, v] : recorded) {
    auto it = current.find(k);
    if (it == current.end()) out.push_back(k + ": " + v + " -> (removed)");
    else if (it->second != v) out.push_back(k + ": " + v + " -> " + it->second);
  }
  for (const auto& [k, v] : current)
    if (!recorded.count(k)) out.push_back(k + ": (absent) -> " + v);
  return out;
}

bool has(const Config& cfg, const std::string& key) { return cfg.count(key) > 0; }

const std::string& text(const Config& cfg, const std::string& key) {
  auto it = cfg.find(key);
  if (it == cfg.end()) fail(ErrorKind::Parse, "missing --" + key);
  return it->second;
}

std::uint64_t get_u64(const Config& cfg, const std::string& key) {
  const std::string& s = text(cfg, key);
  mpz_class v;
  bool ok = !s.empty() && s.find_first_not_of("0123456789") == std::string::npos && v.set_str(s, 10) == 0;
  if (!ok || v > mpz_class("18446744073709551615"))
    fail(ErrorKind::Parse, "--" + key + " expects a nonnegative integer, got '" + s + "'");
  return dioph::to_u64(v);
}

unsigned get_uint(const Config& cfg, const std::string& key) {
  const std::uint64_t v = get_u64(cfg, key);
  if (v > 0xffffffffULL) fail(ErrorKind::Parse, "--" + key + " out of range");
  return static_cast<unsigned>(v);
}

mpq_class get_rational(const Config& cfg, const std::string& key) {
  const std::string& s = text(cfg, key);
  dioph::RealExpr e;
  try {
    e = dioph::RealExpr::parse(s);
  } catch (const dioph::Error&) {
    fail(ErrorKind::Parse, "--" + key + " expects a rational (p/q or decimal), got '" + s + "'");
  }
  if (!e.value().is_rational()) fail(ErrorKind::Parse, "--" + key + " must be rational, got '" + s + "'");
  return e.value().rational_part();
}

std::vector<std::uint64_t> get_u64_list(const Config& cfg, const std::string& key) {
  std::vector<std::uint64_t> out;
  const std::string& s = text(cfg, key);
  std::size_t start = 0;
  while (start <= s.size()) {
    const std::size_t comma = s.find(',', start);
    const std::string part = s.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
    out.push_back(get_u64(Config{{key, part}}, key));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

dioph::Budget get_budget(const Config& cfg) {
  dioph::Budget b;
  b.max_scan_steps = get_u64(cfg, "max_scan_steps");
  b.max_cells = get_u64(cfg, "max_cells");
  return b;
}

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt(bool v) { return v ? "true" : "false"; }

std::string fmt(const mpq_class& v) { return v.get_str(); }

std::string fmt(const dioph::CertifiedValue& v) { return v.to_string(); }

ReplayOutcome replay_bytes(const std::string& recorded) {
  auto [version, cfg] = recorded_run(recorded);
  if (!cfg.count("command")) fail(ErrorKind::Parse, "config echo has no command");
  const Command* cmd = find_command(cfg.at("command"));
  if (!cmd) fail(ErrorKind::Parse, "unknown command '" + cfg.at("command") + "' in config echo");

  std::set<std::string> known = {"command"};
  for (const auto& p : common_params()) known.insert(p.name);
  for (const auto& p : cmd->params) known.insert(p.name);
  Config usable;
  for (const auto& [k, v] : cfg)
    if (known.count(k)) usable[k] = v;
  const Config current = resolve(*cmd, usable, {});
  ReplayOutcome out;
  out.bytes = recorded.size();
  out.drift = config_diff(cfg, current);
  if (version != DIOPH_VERSION) out.drift.insert(out.drift.begin(), "version: " + version + " -> " + DIOPH_VERSION);
  const std::string fresh = render(current, cmd->run(current));
  if (fresh != recorded) out.first_diff_line = first_difference_line(fresh, recorded);
  out.identical = fresh == recorded && out.drift.empty();
  return out;
}

int exit_status(const std::exception& e) {
  const auto* err = dynamic_cast<const dioph::Error*>(&e);
  if (!err) return 1;
  switch (err->kind()) {
    case ErrorKind::BudgetExceeded: return 3;
    case ErrorKind::PrecisionExhausted: return 4;
    case ErrorKind::DriftDetected: return 5;
    default: return 2;
  }
}

}  // namespace dtk

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "dioph/counting.hpp"
#include "dioph/real.hpp"

namespace dtk {

// Fully resolved flags of one run; every value kept as its literal text.
using Config = std::map<std::string, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct Result {
  Table table;
  std::map<std::string, std::string> summary;
};

struct Param {
  std::string name;
  std::string fallback;  // default; empty means unset
  std::string help;
  bool required = false;
};

struct Command {
  std::string name;
  std::string help;
  std::vector<Param> params;
  std::function<Result(const Config&)> run;
};

const std::vector<Command>& commands();
const Command* find_command(const std::string& name);

// Parameters every command accepts.
const std::vector<Param>& common_params();

// defaults, then the config file values, then explicit flags
Config resolve(const Command& cmd, const Config& file_values, const Config& flags);

// JSON object -> literal map; numbers and booleans are taken by their JSON text.
Config config_from_json_text(const std::string& text);

std::string config_echo(const Config& cfg);
std::string render(const Config& cfg, const Result& result);

// Field-level difference between two resolved configs, one line per key.
std::vector<std::string> config_diff(const Config& recorded, const Config& current);

// Literal accessors; malformed values raise a parse error naming the key.
bool has(const Config& cfg, const std::string& key);
const std::string& text(const Config& cfg, const std::string& key);
std::uint64_t get_u64(const Config& cfg, const std::string& key);
unsigned get_uint(const Config& cfg, const std::string& key);
mpq_class get_rational(const Config& cfg, const std::string& key);
std::vector<std::uint64_t> get_u64_list(const Config& cfg, const std::string& key);
dioph::Budget get_budget(const Config& cfg);

std::string fmt(double v);
std::string fmt(bool v);
std::string fmt(const mpq_class& v);
std::string fmt(const dioph::CertifiedValue& v);

struct ReplayOutcome {
  bool identical = false;
  std::vector<std::string> drift;  // config and version differences
  std::size_t first_diff_line = 0;  // 0 when the bytes agree
  std::size_t bytes = 0;
};

// Re-runs the config echoed in a result file and compares the bytes.
ReplayOutcome replay_bytes(const std::string& recorded);

// Process exit status for an error kind.
int exit_status(const std::exception& e);

}  // namespace dtk

#include <chrono>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "dioph/errors.hpp"
#include "harness.hpp"

namespace {

using dioph::ErrorKind;
using dioph::fail;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::Parse, "cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& bytes) {
  if (path.empty()) {
    std::cout << bytes;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidInput, "cannot write " + path);
  out << bytes;
}

int replay(const std::string& path) {
  const dtk::ReplayOutcome r = dtk::replay_bytes(read_file(path));
  if (r.identical) {
    std::cout << "replay identical: " << path << " (" << r.bytes << " bytes)\n";
    return 0;
  }
  std::cerr << "drift detected: " << path << '\n';
  for (const auto& d : r.drift) std::cerr << "  " << d << '\n';
  if (r.first_diff_line) std::cerr << "  output differs from line " << r.first_diff_line << '\n';
  return 5;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dtk: experiments on Diophantine approximation counts, exponents and measures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", DIOPH_VERSION);

  std::map<std::string, std::map<std::string, std::string>> values;
  std::map<std::string, std::map<std::string, CLI::Option*>> options;
  std::map<std::string, std::string> config_path, out_path;
  for (const dtk::Command& cmd : dtk::commands()) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    auto add = [&](const dtk::Param& p) {
      std::string help = p.help;
      if (!p.fallback.empty()) help += " [default " + p.fallback + "]";
      options[cmd.name][p.name] = sub->add_option("--" + p.name, values[cmd.name][p.name], help);
    };
    for (const auto& p : cmd.params) add(p);
    for (const auto& p : dtk::common_params()) add(p);
    sub->add_option("--config", config_path[cmd.name], "JSON config; flags override its keys");
    sub->add_option("--out", out_path[cmd.name], "output file (default stdout)");
  }
  std::string replay_path;
  CLI::App* rp = app.add_subcommand("replay", "re-run a result file and compare bytes");
  rp->add_option("file", replay_path, "result file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (rp->parsed()) return replay(replay_path);
    for (const dtk::Command& cmd : dtk::commands()) {
      if (!app.got_subcommand(cmd.name)) continue;
      const auto start = std::chrono::steady_clock::now();
      dtk::Config file_values, flags;
      if (!config_path[cmd.name].empty()) file_values = dtk::config_from_json_text(read_file(config_path[cmd.name]));
      for (const auto& [name, opt] : options[cmd.name])
        if (opt->count() > 0) flags[name] = values[cmd.name][name];
      const dtk::Config cfg = dtk::resolve(cmd, file_values, flags);
      const std::string bytes = dtk::render(cfg, cmd.run(cfg));
      write_output(out_path[cmd.name], bytes);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      std::cerr << "wall-time " << secs << " s\n";
      return 0;
    }
  } catch (const std::exception& e) {
    const int status = dtk::exit_status(e);
    const auto* err = dynamic_cast<const dioph::Error*>(&e);
    std::cerr << "error (" << (err ? dioph::error_kind_name(err->kind()) : "internal") << "): " << e.what() << '\n';
    return status;
  }
  return 0;
}

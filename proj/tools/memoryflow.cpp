// memoryflow: command-line front end for the simulation library.
//
//   memoryflow <subcommand> [--config file.json] [--out dir] [--preset figN]
//              [--engine series|quadrature|strong-limit] [--steps N] [--threads N]
//              [--set key=value ...]
//
// Precedence: built-in defaults < preset < config file < flags.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "memoryflow/runner.hpp"

namespace fs = std::filesystem;
using memoryflow::json;

namespace {

struct Options {
  std::string config_path;
  std::string out_dir = ".";
  std::string preset;
  std::string engine;
  std::optional<int> steps;
  std::optional<int> threads;
  std::vector<std::string> sets;
};

json read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw memoryflow::IoError("cannot open config file " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw memoryflow::ConfigError(std::string("config: invalid JSON: ") + e.what());
  }
}

/// `a.b=value` becomes {"a": {"b": value}}; the value is parsed as JSON when possible.
void apply_set(json& overrides, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw memoryflow::ConfigError("--set: expected key=value, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string raw = assignment.substr(eq + 1);
  json value = json::parse(raw, nullptr, false);
  if (value.is_discarded()) value = raw;
  json* node = &overrides;
  std::size_t start = 0;
  for (;;) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? dot : dot - start);
    if (dot == std::string::npos) {
      (*node)[part] = value;
      break;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw memoryflow::IoError("cannot write " + path.string());
  out << contents;
  if (!out) throw memoryflow::IoError("write failed for " + path.string());
}

int run(const std::string& command, const Options& opt) {
  json overrides = json::object();
  for (const auto& s : opt.sets) apply_set(overrides, s);
  if (!opt.engine.empty()) overrides["engine"] = opt.engine;
  if (opt.steps) overrides["steps"] = *opt.steps;
  if (opt.threads) overrides["threads"] = *opt.threads;

  std::optional<json> file;
  if (!opt.config_path.empty()) file = read_config_file(opt.config_path);
  std::optional<std::string> preset;
  if (!opt.preset.empty()) preset = opt.preset;

  const memoryflow::RunConfig config = memoryflow::resolve_config(preset, file, overrides);
  const memoryflow::RunOutput result = memoryflow::run_command(command, config);

  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  if (ec) throw memoryflow::IoError("cannot create " + opt.out_dir + ": " + ec.message());
  for (const auto& [name, contents] : result.files) {
    write_file(fs::path(opt.out_dir) / name, contents);
    std::cout << (fs::path(opt.out_dir) / name).string() << '\n';
  }
  const fs::path manifest = fs::path(opt.out_dir) / memoryflow::manifest_name(result);
  write_file(manifest, memoryflow::render_manifest(result));
  std::cout << manifest.string() << '\n';
  if (result.exit_code != memoryflow::exit_code::kSuccess)
    std::cerr << "memoryflow: " << command << " reported a numeric or oracle failure\n";
  return result.exit_code;
}

const std::map<std::string, std::string> kDescriptions{
    {"dephasing", "Spectral density and |kappa(t)| revival curves"},
    {"controlled-qubit", "Bloch trajectories, trace distance and N for a state pair"},
    {"strong-limit-error", "Channel distance between exact and strong-dephasing maps"},
    {"walk", "Closed Hadamard walk position distribution"},
    {"open-walk-nm", "N10 sweep of the dephased walk over the step length"},
    {"oracle", "Brute-force checks of the analytical formulas"}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Discrete open quantum dynamics with dephasing: qubit and quantum walk"};
  app.set_version_flag("--version", memoryflow::kVersion);
  app.require_subcommand(1);

  Options opt;
  std::string selected;
  for (const auto& name : memoryflow::command_names()) {
    CLI::App* sub = app.add_subcommand(name, kDescriptions.at(name));
    sub->add_option("--config", opt.config_path, "JSON run configuration");
    sub->add_option("--out", opt.out_dir, "Output directory")->capture_default_str();
    sub->add_option("--preset", opt.preset, "Named parameter set (fig1 .. fig5)");
    sub->add_option("--engine", opt.engine, "series | quadrature | strong-limit");
    sub->add_option("--steps", opt.steps, "Number of steps");
    sub->add_option("--threads", opt.threads, "Worker threads for sweeps");
    sub->add_option("--set", opt.sets, "Override a config field, e.g. --set A=0.5")
        ->take_all();
    sub->callback([&selected, name] { selected = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? memoryflow::exit_code::kSuccess : memoryflow::exit_code::kUsage;
  }

  try {
    return run(selected, opt);
  } catch (const memoryflow::ConfigError& e) {
    std::cerr << "memoryflow: " << e.what() << '\n';
    return memoryflow::exit_code::kUsage;
  } catch (const memoryflow::IoError& e) {
    std::cerr << "memoryflow: " << e.what() << '\n';
    return memoryflow::exit_code::kIo;
  } catch (const memoryflow::DomainError& e) {
    std::cerr << "memoryflow: " << e.what() << '\n';
    return memoryflow::exit_code::kUsage;
  } catch (const memoryflow::UnsupportedCase& e) {
    std::cerr << "memoryflow: " << e.what() << '\n';
    return memoryflow::exit_code::kUsage;
  } catch (const std::exception& e) {
    std::cerr << "memoryflow: " << e.what() << '\n';
    return memoryflow::exit_code::kNumeric;
  }
}

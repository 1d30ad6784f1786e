#include "commands.hpp"
#include "config.hpp"

#include "gflow/error.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <future>
#include <iostream>
#include <map>

namespace {

using namespace gflow;
using namespace gflow::cli;

constexpr int kOk = 0;
constexpr int kIoFailure = 1;
constexpr int kValidation = 2;
constexpr int kNumerical = 3;

struct Outcome {
  int status = kOk;
  std::string message;
};

std::string default_output_dir() {
  const char* env = std::getenv("GFLOW_OUTPUT_DIR");
  return env && *env ? env : "gflow-output";
}

Outcome execute(const Json& cfg, const std::filesystem::path& dir) {
  RunResult result;
  try {
    result = run_command(cfg);
  } catch (const InvalidInput& e) {
    return {kValidation, std::string("invalid input: ") + e.what()};
  } catch (const NumericalFailure& e) {
    return {kNumerical, std::string("numerical failure: ") + e.what()};
  }
  const auto& out = cfg.at("output");
  try {
    for (const auto& [name, content] : result.files) {
      const auto ext = std::filesystem::path(name).extension();
      if (ext == ".csv" && !out.at("csv").get<bool>()) continue;
      if (ext == ".json" && !out.at("json").get<bool>()) continue;
      io::write_atomic(dir / name, content);
    }
  } catch (const std::exception& e) {
    return {kIoFailure, std::string("output failure: ") + e.what()};
  }
  return {kOk, result.summary};
}

struct SweepAxis {
  std::string key;
  std::vector<std::pair<std::string, Json>> values; // text as given, parsed value
};

SweepAxis parse_sweep(const CommandSpec& cmd, const std::string& arg) {
  const auto eq = arg.find('=');
  if (eq == std::string::npos || eq == 0 || eq + 1 == arg.size())
    throw ConfigError("--sweep " + arg + ": expected KEY=V1,V2,...");
  SweepAxis axis{arg.substr(0, eq), {}};
  const ParamSpec* spec = nullptr;
  for (const auto& p : cmd.params)
    if (p.name == axis.key) spec = &p;
  if (!spec) throw ConfigError("--sweep: '" + axis.key + "' is not a parameter of " + cmd.name);
  std::string rest = arg.substr(eq + 1);
  std::size_t start = 0;
  while (start <= rest.size()) {
    const auto comma = std::min(rest.find(',', start), rest.size());
    const std::string tok = rest.substr(start, comma - start);
    axis.values.emplace_back(tok, parse_value(*spec, tok, "--sweep " + axis.key));
    start = comma + 1;
  }
  return axis;
}

struct SweepRun {
  std::string subdir;
  Json cfg;
};

std::vector<SweepRun> expand(const Json& base, const std::vector<SweepAxis>& axes) {
  std::vector<SweepRun> runs{{"", base}};
  for (const auto& axis : axes) {
    std::vector<SweepRun> next;
    for (const auto& r : runs)
      for (const auto& [textv, value] : axis.values) {
        SweepRun s = r;
        s.cfg["parameters"][axis.key] = value;
        s.subdir += (s.subdir.empty() ? "" : "_") + axis.key + "=" + textv;
        next.push_back(std::move(s));
      }
    runs = std::move(next);
  }
  return runs;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical experiments for shrinking solitons of the generalized Ricci flow"};
  app.fallthrough();
  app.require_subcommand(0, 1);

  std::string config_path, out_dir;
  std::vector<std::string> sweeps;
  std::string rtol, atol, grid;
  bool dump_config = false;
  app.add_option("--config", config_path, "strict JSON configuration file");
  app.add_option("--out", out_dir, "output directory (default $GFLOW_OUTPUT_DIR or ./gflow-output)");
  app.add_option("--rtol", rtol, "integrator relative tolerance");
  app.add_option("--atol", atol, "integrator absolute tolerance");
  app.add_option("--grid", grid, "grid points for grid-based commands");
  app.add_option("--sweep", sweeps, "KEY=V1,V2,...: run every value concurrently in KEY=V subdirectories");
  app.add_flag("--dump-config", dump_config, "print the resolved configuration and exit");

  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, CLI::App*> subs;
  for (const auto& cmd : commands()) {
    auto* sub = app.add_subcommand(cmd.name, cmd.help);
    subs[cmd.name] = sub;
    for (const auto& p : cmd.params)
      sub->add_option("--" + p.name, raw[cmd.name][p.name], p.help);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    Json user = nullptr;
    if (!config_path.empty()) user = load_config_file(config_path);

    std::string name;
    for (const auto& [n, sub] : subs)
      if (sub->parsed()) name = n;
    if (name.empty()) {
      if (!user.is_object() || !user.contains("command") || !user["command"].is_string())
        throw ConfigError("no command given on the command line or in the config");
      name = user["command"].get<std::string>();
    }
    const auto& cmd = find_command(name);
    Json cfg = resolve(cmd, user, default_output_dir());

    for (const auto& p : cmd.params) {
      const auto* opt = subs[name]->get_option("--" + p.name);
      if (opt->count() > 0)
        cfg["parameters"][p.name] = parse_value(p, raw[name][p.name], "--" + p.name);
    }
    const auto tol_spec = [](const char* key, Kind k) { return ParamSpec{key, k, nullptr, ""}; };
    if (!rtol.empty()) cfg["tolerances"]["rtol"] = parse_value(tol_spec("rtol", Kind::number), rtol, "--rtol");
    if (!atol.empty()) cfg["tolerances"]["atol"] = parse_value(tol_spec("atol", Kind::number), atol, "--atol");
    if (!grid.empty()) cfg["tolerances"]["grid"] = parse_value(tol_spec("grid", Kind::integer), grid, "--grid");
    if (!out_dir.empty()) cfg["output"]["directory"] = out_dir;

    std::vector<SweepAxis> axes;
    for (const auto& s : sweeps) axes.push_back(parse_sweep(cmd, s));

    if (dump_config) {
      std::cout << io::dump(cfg);
      return kOk;
    }

    const std::filesystem::path dir = cfg["output"]["directory"].get<std::string>();
    if (axes.empty()) {
      const auto o = execute(cfg, dir);
      (o.status == kOk ? std::cout : std::cerr) << o.message << '\n';
      return o.status;
    }

    const auto runs = expand(cfg, axes);
    std::vector<std::future<Outcome>> jobs;
    for (const auto& r : runs)
      jobs.push_back(std::async(std::launch::async, [&r, &dir] { return execute(r.cfg, dir / r.subdir); }));
    int status = kOk;
    for (std::size_t i = 0; i < runs.size(); ++i) {
      const auto o = jobs[i].get();
      (o.status == kOk ? std::cout : std::cerr) << runs[i].subdir << ": " << o.message << '\n';
      status = std::max(status, o.status);
    }
    return status;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kValidation;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return kValidation;
  }
}

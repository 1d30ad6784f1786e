#include "config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace gflow::cli {

namespace {

std::vector<ParamSpec> flow_params(double h0sq) {
  return {{"h0sq", Kind::number, h0sq, "initial h^2"},
          {"h_sign", Kind::integer, 1, "sign of the initial h, +1 or -1"},
          {"lambda0", Kind::number, 1.0, "initial sphere scale"},
          {"beta0", Kind::number, 1.0, "initial circle scale"},
          {"tmax", Kind::number, 100.0, "integration horizon"},
          {"lambda_floor", Kind::number, 1e-8, "lambda at which the run stops"}};
}

std::vector<ParamSpec> with(std::vector<ParamSpec> base, std::vector<ParamSpec> extra) {
  base.insert(base.end(), extra.begin(), extra.end());
  return base;
}

std::vector<CommandSpec> build() {
  std::vector<CommandSpec> out;
  out.push_back({"cylinder-flow", "integrate the S2 x S1 flow and write its trajectory",
                 with(flow_params(0.5),
                      {{"sample_dt", Kind::number, 0.01,
                        "output spacing in t; 0 writes the accepted steps"}})});
  out.push_back({"blowup", "blowup sequence lambda h^2 and the opening beta^2/lambda",
                 with(flow_params(0.3),
                      {{"n_samples", Kind::integer, 16, "geometric samples toward T"},
                       {"threshold", Kind::number, 1e6, "opening threshold"},
                       {"limit_tolerance", Kind::number, 1e-4, "tolerance on the limit 1/2"}})});
  out.push_back({"torsion", "divergence of int 6 h^2 toward the singular time",
                 with(flow_params(0.5),
                      {{"psi0", Kind::number, 12.0, "level whose crossing time is reported"},
                       {"n_samples", Kind::integer, 64, "samples of the integral"},
                       {"fit_depth", Kind::number, 1e-4, "fit window depth relative to T"}})});
  out.push_back({"shoot", "shoot the smooth-origin branch of the R3 profile equation",
                 {{"r_switch", Kind::number, 0.05, "radius where the origin series hands over"},
                  {"u_floor", Kind::number, 1e-8, "terminal threshold for u"},
                  {"r_max", Kind::number, 50.0, "largest radius"}}});
  out.push_back({"soliton-residual", "ODE and tensor residuals of an explicit soliton",
                 {{"example", Kind::text, "cylinder", "explicit soliton", {"cylinder", "gaussian"}},
                  {"extent", Kind::number, 0.0, "profile extent; 0 keeps the example default"},
                  {"convention_tol", Kind::number, 1e-9, "tolerance of the convention check"}}});
  out.push_back({"entropy", "shrinking entropy along the S2 x S1 flow",
                 with(flow_params(0.5),
                      {{"t_ref", Kind::number, 0.0, "reference time T; 0 uses the singular time"},
                       {"mass0", Kind::number, 1.0, "initial mass of the heat weight"},
                       {"t_lo", Kind::number, 0.01, "first sample time"},
                       {"t_hi", Kind::number, 0.0, "last sample time; 0 picks 3/4 of the range"},
                       {"samples", Kind::integer, 60, "number of sample times"},
                       {"dt", Kind::number, 1e-4, "central-difference step"},
                       {"order_dt", Kind::number, 0.04, "step for the measured order"}})});
  out.push_back({"heat-check", "pointwise heat identities on an explicit soliton",
                 {{"example", Kind::text, "cylinder", "explicit soliton", {"cylinder", "gaussian"}},
                  {"r_max", Kind::number, 3.0, "radial extent of the grid"},
                  {"dt", Kind::number, 1e-4, "time step of the central differences"},
                  {"dr", Kind::number, 0.01, "radial stencil spacing"}}});
  out.push_back({"hodge-check", "form identities on a periodic grid",
                 {{"dim", Kind::integer, 3, "torus dimension, 3 or 4"},
                  {"form", Kind::text, "auto", "3-form data", {"auto", "sine", "closed"}},
                  {"axis", Kind::integer, -1, "axis of f = a cos(x_axis) + c; -1 picks y on T3 and w on T4"},
                  {"amplitude", Kind::number, 1.0, "a in f"},
                  {"shift", Kind::number, 0.0, "c in f"},
                  {"gradient", Kind::text, "analytic", "gradient of f", {"analytic", "discrete"}},
                  {"rate", Kind::boolean, true, "also run the half grid and report the rate"}}});
  return out;
}

const char* kind_name(Kind k) {
  switch (k) {
  case Kind::number: return "a finite number";
  case Kind::integer: return "an integer";
  case Kind::text: return "a string";
  case Kind::boolean: return "a boolean";
  }
  return "";
}

Json check_value(const ParamSpec& spec, const Json& v, const std::string& where) {
  switch (spec.kind) {
  case Kind::number:
    if (v.is_number() && std::isfinite(v.get<double>())) return v.get<double>();
    break;
  case Kind::integer:
    if (v.is_number_integer()) return v;
    break;
  case Kind::boolean:
    if (v.is_boolean()) return v;
    break;
  case Kind::text:
    if (v.is_string()) {
      const auto s = v.get<std::string>();
      if (spec.choices.empty()) return v;
      for (const auto& c : spec.choices)
        if (c == s) return v;
      std::string opts;
      for (const auto& c : spec.choices) opts += (opts.empty() ? "" : ", ") + c;
      throw ConfigError(where + ": '" + s + "' is not one of {" + opts + "}");
    }
    break;
  }
  throw ConfigError(where + ": expected " + kind_name(spec.kind));
}

const std::vector<ParamSpec>& tolerance_specs() {
  static const std::vector<ParamSpec> specs{
      {"rtol", Kind::number, 1e-12, "integrator relative tolerance"},
      {"atol", Kind::number, 1e-14, "integrator absolute tolerance"},
      {"grid", Kind::integer, 0, "grid points; 0 keeps the command default"}};
  return specs;
}

const std::vector<ParamSpec>& output_specs() {
  static const std::vector<ParamSpec> specs{
      {"directory", Kind::text, "", "output directory"},
      {"csv", Kind::boolean, true, "write CSV files"},
      {"json", Kind::boolean, true, "write JSON reports"}};
  return specs;
}

void merge_section(Json& target, const Json& user, const std::vector<ParamSpec>& specs,
                   const std::string& section) {
  if (!user.is_object()) throw ConfigError(section + ": expected an object");
  for (const auto& [key, value] : user.items()) {
    const ParamSpec* spec = nullptr;
    for (const auto& s : specs)
      if (s.name == key) spec = &s;
    if (!spec) throw ConfigError(section + "." + key + ": unknown key");
    target[key] = check_value(*spec, value, section + "." + key);
  }
}

} // namespace

const std::vector<CommandSpec>& commands() {
  static const std::vector<CommandSpec> table = build();
  return table;
}

const CommandSpec& find_command(const std::string& name) {
  for (const auto& c : commands())
    if (c.name == name) return c;
  throw ConfigError("command: unknown command '" + name + "'");
}

Json load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return Json::parse(text, nullptr, true, false);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string what = e.what();
    if (const auto p = what.find("syntax error"); p != std::string::npos) what = what.substr(p);
    throw ConfigError(path + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + what);
  }
}

Json parse_value(const ParamSpec& spec, const std::string& raw, const std::string& where) {
  switch (spec.kind) {
  case Kind::number: {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(raw, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != raw.size() || raw.empty() || !std::isfinite(v))
      throw ConfigError(where + ": '" + raw + "' is not a finite number");
    return v;
  }
  case Kind::integer: {
    std::size_t used = 0;
    long long v = 0;
    try {
      v = std::stoll(raw, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != raw.size() || raw.empty())
      throw ConfigError(where + ": '" + raw + "' is not an integer");
    return v;
  }
  case Kind::boolean:
    if (raw == "true" || raw == "1") return true;
    if (raw == "false" || raw == "0") return false;
    throw ConfigError(where + ": '" + raw + "' is not a boolean");
  case Kind::text:
    return check_value(spec, raw, where);
  }
  return nullptr;
}

Json defaults(const CommandSpec& cmd, const std::string& default_dir) {
  Json params = Json::object();
  for (const auto& p : cmd.params) params[p.name] = p.fallback;
  Json tol = Json::object();
  for (const auto& p : tolerance_specs()) tol[p.name] = p.fallback;
  Json out = Json::object();
  for (const auto& p : output_specs()) out[p.name] = p.fallback;
  out["directory"] = default_dir;
  return {{"command", cmd.name}, {"parameters", params}, {"tolerances", tol}, {"output", out}};
}

Json resolve(const CommandSpec& cmd, const Json& user, const std::string& default_dir) {
  Json cfg = defaults(cmd, default_dir);
  if (user.is_null()) return cfg;
  if (!user.is_object()) throw ConfigError("config: expected a JSON object");
  if (user.empty()) throw ConfigError("config: empty configuration");
  for (const auto& [key, value] : user.items()) {
    if (key == "command") {
      if (!value.is_string()) throw ConfigError("command: expected a string");
      if (value.get<std::string>() != cmd.name)
        throw ConfigError("command: config names '" + value.get<std::string>() +
                          "' but '" + cmd.name + "' was requested");
    } else if (key == "parameters") {
      merge_section(cfg["parameters"], value, cmd.params, "parameters");
    } else if (key == "tolerances") {
      merge_section(cfg["tolerances"], value, tolerance_specs(), "tolerances");
    } else if (key == "output") {
      merge_section(cfg["output"], value, output_specs(), "output");
    } else {
      throw ConfigError(key + ": unknown key");
    }
  }
  return cfg;
}

double num(const Json& cfg, const std::string& key) {
  return cfg.at("parameters").at(key).get<double>();
}
long long integer(const Json& cfg, const std::string& key) {
  return cfg.at("parameters").at(key).get<long long>();
}
std::string text(const Json& cfg, const std::string& key) {
  return cfg.at("parameters").at(key).get<std::string>();
}
bool flag(const Json& cfg, const std::string& key) {
  return cfg.at("parameters").at(key).get<bool>();
}

} // namespace gflow::cli

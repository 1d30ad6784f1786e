#include "gflow/io/output.hpp"

#include "gflow/error.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <system_error>
#include <unistd.h>

namespace gflow::io {

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (i) text_ += ',';
    text_ += header[i];
  }
  text_ += '\n';
}

void CsvWriter::row(std::span<const double> values) {
  if (values.size() != width_) throw InvalidInput("CSV row width does not match the header");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) text_ += ',';
    text_ += format_number(values[i]);
  }
  text_ += '\n';
}

void write_atomic(const std::filesystem::path& path, std::string_view content) {
  namespace fs = std::filesystem;
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) {
      std::error_code ec;
      fs::remove(tmp, ec);
      throw std::runtime_error("cannot write " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    std::error_code ignored;
    fs::remove(tmp, ignored);
    throw std::runtime_error("cannot replace " + path.string() + ": " + ec.message());
  }
}

std::string cylinder_csv(std::span<const cylinder::FlowStep> steps) {
  CsvWriter csv({"t", "lambda", "h", "beta", "lambda_h2", "u", "lambda_h_beta",
                 "torsion_integral"});
  for (const auto& s : steps) {
    const double row[] = {s.t, s.lambda, s.h, s.beta, s.lambda_h2, s.u, s.lambda_h_beta,
                          s.torsion_integral};
    csv.row(row);
  }
  return csv.str();
}

std::string entropy_csv(const entropy::EntropyTrace& tr) {
  CsvWriter csv({"t", "tau", "W", "dW_fd", "dW_formula", "gap"});
  const auto col = [](const std::vector<double>& v, std::size_t i) {
    return i < v.size() ? v[i] : std::nan("");
  };
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    const double row[] = {tr.times[i], tr.tau[i], tr.W[i], col(tr.dW_fd, i),
                          col(tr.dW_formula, i), col(tr.gap, i)};
    csv.row(row);
  }
  return csv.str();
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

namespace {

Json optional_number(const std::optional<double>& v) { return v ? number(*v) : Json(nullptr); }

} // namespace

Json to_json(const cylinder::DiagnosticsReport& r) {
  return {{"conservation_drift", number(r.conservation_drift)},
          {"sign_preserved", r.sign_preserved},
          {"expected_trend", cylinder::to_string(r.expected_trend)},
          {"monotonicity_violation", number(r.monotonicity_violation)},
          {"monotone", r.monotone},
          {"identity_error", number(r.identity_error)}};
}

Json to_json(const cylinder::BlowupReport& r) {
  Json samples = Json::array();
  for (const auto& s : r.samples)
    samples.push_back({{"t", number(s.t)}, {"lambda_h2", number(s.lambda_h2)},
                       {"opening", number(s.opening)}});
  return {{"ricci_flow_case", r.ricci_flow_case},
          {"limit", number(r.limit)},
          {"limit_error", number(r.limit_error)},
          {"convergence_ratio", number(r.convergence_ratio)},
          {"limit_is_half", r.limit_is_half},
          {"opening_increasing", r.opening_increasing},
          {"opening_threshold", number(r.opening_threshold)},
          {"opening_crossing", optional_number(r.opening_crossing)},
          {"samples", samples}};
}

Json to_json(const cylinder::DivergenceReport& r) {
  return {{"coefficient", number(r.coefficient)},
          {"window_lo", number(r.window_lo)},
          {"window_hi", number(r.window_hi)},
          {"psi0", optional_number(r.psi0)},
          {"crossing_time", optional_number(r.crossing_time)},
          {"samples", r.times.size()}};
}

Json to_json(const shooter::ShootingReport& r) {
  return {{"r1", optional_number(r.r1)},
          {"r2", optional_number(r.r2)},
          {"r3", optional_number(r.r3)},
          {"r4", optional_number(r.r4)},
          {"u_max", number(r.u_max)},
          {"invariant_initial", number(r.invariant_initial)},
          {"invariant_drift", number(r.invariant_drift)},
          {"terminated_at_zero", r.terminated_at_zero},
          {"u_terminal", number(r.u_terminal)},
          {"p_terminal", number(r.p_terminal)},
          {"termination", ode::to_string(r.termination)}};
}

Json to_json(const warped::ConventionReport& r) {
  return {{"consistent", r.consistent},
          {"ode_max", number(r.ode_max)},
          {"tensor_max", number(r.tensor_max)},
          {"tolerance", number(r.tolerance)},
          {"message", r.message}};
}

std::string dump(const Json& j) { return j.dump(2) + '\n'; }

} // namespace gflow::io

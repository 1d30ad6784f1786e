#pragma once

// Text artifacts: CSV with '.' decimals, '\n' line endings and 17 significant
// digits; JSON reports; files replaced atomically through a sibling temp file.

#include "gflow/cylinder/flow.hpp"
#include "gflow/entropy/entropy.hpp"
#include "gflow/shooter/phase_plane.hpp"
#include "gflow/warped/soliton.hpp"

#include <json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gflow::io {

using Json = nlohmann::ordered_json;

/// Shortest form that round-trips: "%.17g", with nan/inf spelled out.
std::string format_number(double v);

class CsvWriter {
public:
  explicit CsvWriter(std::vector<std::string> header);
  /// Throws InvalidInput when the row width differs from the header.
  void row(std::span<const double> values);
  const std::string& str() const { return text_; }

private:
  std::size_t width_;
  std::string text_;
};

/// Writes content to path.tmp.<pid> and renames it over path. Creates parent
/// directories. Throws std::runtime_error on I/O failure and leaves no temp file.
void write_atomic(const std::filesystem::path& path, std::string_view content);

/// t, lambda, h, beta, lambda_h2, u, lambda_h_beta, torsion_integral
std::string cylinder_csv(std::span<const cylinder::FlowStep> steps);
/// t, tau, W, dW_fd, dW_formula, gap
std::string entropy_csv(const entropy::EntropyTrace& trace);

/// Non-finite numbers become null.
Json number(double v);

Json to_json(const cylinder::DiagnosticsReport& r);
Json to_json(const cylinder::BlowupReport& r);
Json to_json(const cylinder::DivergenceReport& r);
Json to_json(const shooter::ShootingReport& r);
Json to_json(const warped::ConventionReport& r);

/// Two-space indent plus a trailing newline.
std::string dump(const Json& j);

} // namespace gflow::io

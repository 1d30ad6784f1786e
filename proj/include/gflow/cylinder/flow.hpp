#pragma once

// Generalized Ricci flow on S^2 x S^1 with g = lambda g_S2 + beta^2 dr^2,
// Ric(g_S2) = g_S2 / 2 and H = h dV:
//   lambda' = -1 + lambda h^2,  h' = h / lambda - (3/2) h^3,  beta' = h^2 beta / 2.
// lambda h beta is conserved and u = 1/2 - lambda h^2 obeys u' = -2 h^2 u.

#include "gflow/ode/integrator.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace gflow::cylinder {

struct CylinderState {
  double lambda = 1.0;
  double h = 0.0;
  double beta = 1.0;
};

/// (lambda', h', beta'). Throws InvalidInput unless lambda > 0.
std::array<double, 3> flow_rhs(const CylinderState& s);

struct FlowOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  double tmax = 100.0;
  /// lambda at which the run stops and the singular time is extrapolated.
  double lambda_floor = 1e-8;
};

/// One accepted step with its scalar diagnostics.
struct FlowStep {
  double t = 0.0;
  double lambda = 0.0;
  double h = 0.0;
  double beta = 0.0;
  double lambda_h2 = 0.0;
  double u = 0.0; // 1/2 - lambda h^2
  double lambda_h_beta = 0.0;
  double torsion_integral = 0.0; // int_0^t 6 h^2
};

struct CylinderTrajectory {
  CylinderState initial;
  FlowOptions options;
  /// Dense trajectory of (lambda, u, beta, I, J) with J = int_0^t (1/lambda - 3h^2/2);
  /// h carries the sign of initial.h.
  ode::Trajectory path;
  std::vector<FlowStep> steps;
  /// Time at which lambda hit the floor, and the linear extrapolation to lambda = 0.
  std::optional<double> t_floor;
  std::optional<double> t_sing;

  /// Diagnostics at any t inside the integrated range.
  FlowStep sample(double t) const;
  /// J(t): a homogeneous conjugate heat weight is u0 e^J.
  double heat_exponent(double t) const;
};

/// Integrates until lambda reaches the floor (a singularity, not an error) or tmax.
CylinderTrajectory run_flow(const CylinderState& initial, const FlowOptions& options = {});

enum class Trend { nondecreasing, nonincreasing, constant };
std::string to_string(Trend t);

struct DiagnosticsReport {
  double conservation_drift = 0.0; // max |lambda h beta - initial|
  bool sign_preserved = true;
  Trend expected_trend = Trend::constant;
  /// Largest step against the expected trend of lambda h^2, beyond round-off.
  double monotonicity_violation = 0.0;
  bool monotone = true;
  /// max |d/dt(lambda h^2) - (h^2 - 2 lambda h^4)|, with the derivative
  /// differenced from dense output, relative to max(1, |h^2 - 2 lambda h^4|).
  double identity_error = 0.0;
};

DiagnosticsReport diagnostics(const CylinderTrajectory& traj);

struct BlowupSample {
  double t = 0.0;
  double lambda_h2 = 0.0;
  double opening = 0.0; // beta^2 / lambda
};

struct BlowupReport {
  std::vector<BlowupSample> samples;
  bool ricci_flow_case = false; // h0 = 0: lambda h^2 is identically zero
  double limit = 0.0;           // extrapolated limit of lambda h^2
  double limit_error = 0.0;
  double convergence_ratio = 0.0; // measured ratio of successive differences
  bool limit_is_half = false;
  bool opening_increasing = false;
  double opening_threshold = 0.0;
  std::optional<double> opening_crossing; // first sample time with opening > threshold
};

/// Samples t_i = T - 2^{-i} (T - t0), i = 1..n_samples, keeping those inside the
/// integrated range. Throws InvalidInput without a singular time or with fewer
/// than 3 usable samples.
BlowupReport blowup_analysis(const CylinderTrajectory& traj, int n_samples = 16,
                             double opening_threshold = 1e6, double limit_tolerance = 1e-4);

struct DivergenceReport {
  std::vector<double> times;
  std::vector<double> integral;
  /// Least-squares c in I = -c ln(T - t) + const over the fit window.
  double coefficient = 0.0;
  double window_lo = 0.0; // bounds on T - t
  double window_hi = 0.0;
  std::optional<double> psi0;
  std::optional<double> crossing_time; // I(t*) = psi0
};

/// Fit window is T - t in [window_lo, 10 window_lo] with window_lo = fit_depth (T - t0).
/// Throws InvalidInput for h0 = 0 (the integral converges) or without a singular time.
DivergenceReport torsion_divergence(const CylinderTrajectory& traj,
                                    std::optional<double> psi0 = std::nullopt,
                                    std::size_t n_samples = 64, double fit_depth = 1e-4);

/// lambda = 1 - t; valid for h0 = 0.
CylinderState ricci_flow_solution(double t, double beta0 = 1.0);
/// lambda = 1 - t/2, h^2 = 1/(2 - t), beta = beta0 / sqrt(1 - t/2); valid for h0^2 = 1/2.
CylinderState balanced_solution(double t, double beta0 = 1.0, double h_sign = 1.0);

} // namespace gflow::cylinder

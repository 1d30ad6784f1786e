#pragma once

// Phase-plane form of phi^2 + phi'^2 + 2 phi phi'' = 1 under u = phi^{3/2},
// p = u':  u'' = (3/4)(u^{-1/3} - u), with first integral
// E = 3u^2 + 4p^2 - 9u^{2/3}. The orbit leaving a smooth origin lies on E = 0.

#include "gflow/ode/integrator.hpp"
#include "gflow/warped/profile.hpp"

#include <array>
#include <optional>

namespace gflow::shooter {

struct PhaseState {
  double r = 0.0;
  double u = 0.0;
  double p = 0.0;
};

/// (u', p'). Throws InvalidInput for u <= 0, where the field is singular.
std::array<double, 2> phase_rhs(const PhaseState& s);

/// E = 3u^2 + 4p^2 - 9u^{2/3}; requires u >= 0.
double orbit_invariant(const PhaseState& s);

/// Odd-series coefficients of phi(r) = r + c3 r^3 + c5 r^5 + c7 r^7 + c9 r^9
/// for the smooth-origin solution.
inline constexpr std::array<double, 4> origin_series{-1.0 / 18.0, 1.0 / 1080.0, -1.0 / 136080.0,
                                                     1.0 / 29393280.0};

/// E = 0 branch state at r_switch from the origin series; 0 < r_switch <= 0.1.
PhaseState series_start(double r_switch);

struct ShootingOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  double r_switch = 0.05;
  /// Terminal threshold standing in for u = 0.
  double u_floor = 1e-8;
  double r_max = 50.0;
};

struct ShootingReport {
  std::optional<double> r1; // u = 1 rising
  std::optional<double> r2; // p = 0 falling, u maximal
  std::optional<double> r3; // u = 1 falling
  std::optional<double> r4; // u = u_floor falling
  double u_max = 0.0;
  double invariant_initial = 0.0;
  double invariant_drift = 0.0;
  bool terminated_at_zero = false;
  double u_terminal = 0.0;
  double p_terminal = 0.0;
  ode::Termination termination = ode::Termination::reached_tmax;
};

struct ShootingRun {
  ShootingReport report;
  ode::Trajectory trajectory; // state (u, p) against r
};

/// Integrates from `start` with the four milestone events.
ShootingRun shoot_from(const PhaseState& start, const ShootingOptions& opts = {});

/// Smooth-origin branch: series start at opts.r_switch, then shoot_from.
ShootingRun shoot_r3_branch_run(const ShootingOptions& opts = {});
inline ShootingReport shoot_r3_branch(const ShootingOptions& opts = {}) {
  return shoot_r3_branch_run(opts).report;
}

/// Plain phase flow from `start` up to r_end, no events.
ode::Trajectory phase_flow(const PhaseState& start, double r_end, const ShootingOptions& opts = {});

/// phi = u^{2/3} sampled from the dense output of `traj` every `spacing`
/// in r, with phi'' taken from the normalized equation.
warped::RadialProfile phi_profile(const ode::Trajectory& traj, double spacing = 0.01);

} // namespace gflow::shooter

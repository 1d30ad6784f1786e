#pragma once

// Shrinking entropy W = int [tau(|grad f|^2 + R - |H|^2/12) + f - n] u dV with
// u = (4 pi tau)^{-n/2} e^{-f}, evaluated for spatially homogeneous conjugate
// heat weights on the S^2 x S^1 flow, plus pointwise checks on explicit solitons.

#include "gflow/cylinder/flow.hpp"
#include "gflow/warped/soliton.hpp"

#include <numbers>
#include <span>
#include <vector>

namespace gflow::entropy {

struct EntropyConfig {
  double T_ref = 1.0;
  int n = 3;
  /// Initial mass int u dV; fixes u0.
  double mass0 = 1.0;
  /// Length parameter of the circle factor.
  double circle_length = 2.0 * std::numbers::pi;
};

struct HeatWeight {
  double t = 0.0;
  double u = 0.0;
  double f = 0.0; // -ln u - (n/2) ln(4 pi tau)
  double tau = 0.0;
};

/// Volume 8 pi lambda L0 beta of S^2 x S^1 at time t.
double volume(const cylinder::CylinderTrajectory& traj, double t, double circle_length);

/// Weight u0 e^J(t) solving u' = (R - |H|^2/4) u = (1/lambda - 3h^2/2) u.
double heat_weight(const cylinder::CylinderTrajectory& traj, double u0, double t);

/// Weights at the accepted steps with t < T_ref. Throws InvalidInput for u0 < 0.
std::vector<HeatWeight> conjugate_heat_homogeneous(const cylinder::CylinderTrajectory& traj,
                                                   double u0, double T_ref, int n = 3);

/// u0 giving int u dV = config.mass0 at the start of traj.
double initial_weight(const cylinder::CylinderTrajectory& traj, const EntropyConfig& config);

std::vector<double> mass(const cylinder::CylinderTrajectory& traj, double u0,
                         std::span<const double> times, double circle_length);

/// max |m(t) - m(t0)| / |m(t0)| over the accepted steps with t < t_max.
double mass_drift(const cylinder::CylinderTrajectory& traj, double u0, double circle_length,
                  double t_max);

struct EntropyTrace {
  std::vector<double> times;
  std::vector<double> tau;
  std::vector<double> W;
  std::vector<double> dW_fd;
  std::vector<double> dW_formula;
  std::vector<double> gap;
  double dt = 0.0;
  double max_gap = 0.0;
  double tolerance = 0.0;
  bool within_tolerance = false;
  double min_formula = 0.0;
};

/// W at one time. Throws InvalidInput unless tau = T_ref - t > 0.
double entropy_at(const cylinder::CylinderTrajectory& traj, const EntropyConfig& config, double t);

/// W only; the derivative columns stay empty.
EntropyTrace entropy_eval(const cylinder::CylinderTrajectory& traj, const EntropyConfig& config,
                          std::span<const double> times);

/// Reduced derivative [2 tau (2 A_s^2 + A_r^2) - h^2] m with
/// A_s = 1/(2 lambda) - h^2/2 - 1/(2 tau), A_r = -h^2/2 - 1/(2 tau).
double entropy_derivative_formula(const cylinder::CylinderTrajectory& traj,
                                  const EntropyConfig& config, double t);

/// Central difference of W with step dt against the reduced formula; tolerance
/// max(1e-6, 10 dt^2 scale) with scale = max(1, max |dW_formula|).
EntropyTrace entropy_derivative_check(const cylinder::CylinderTrajectory& traj,
                                      const EntropyConfig& config, std::span<const double> times,
                                      double dt);

/// log2 of the max-gap ratio between steps dt and dt/2.
double measured_fd_order(const cylinder::CylinderTrajectory& traj, const EntropyConfig& config,
                         std::span<const double> times, double dt);

/// n evenly spaced times in [t_lo, t_hi] after checking that t +- 2 dt stays
/// inside the integrated range and below T_ref.
std::vector<double> sample_times(const cylinder::CylinderTrajectory& traj,
                                 const EntropyConfig& config, double t_lo, double t_hi,
                                 std::size_t n, double dt);

struct PointwiseReport {
  std::vector<double> grid;
  std::vector<double> lhs;
  std::vector<double> rhs;
  std::vector<double> residual;
  double max_residual = 0.0;
  double dt = 0.0;
};

/// d/dt f_t at t = 0 along the pullback by the flow of grad f / (1 - t), by
/// central differences, against -Delta f + |grad f|^2 - R + |H|^2/4 + n/2.
/// Requires soliton constant 1 (checked with convention_check) and f' = c r.
PointwiseReport soliton_heat_check(const warped::WarpedSolitonData& data,
                                   std::span<const double> grid, double dt);

/// Conjugate heat operator of v = [tau(2 Delta f - |grad f|^2 + R - |H|^2/12) + f - n] u
/// against -(2 tau |Ric - H^2/4 + Hess f - g/(2 tau)|^2 + (tau/2)|d*H + i_{grad f} H|^2
/// - |H|^2/6) u at t = 0. Time derivative by central differences with dt, radial
/// derivatives by a sixth-order stencil with dr.
PointwiseReport pointwise_monotonicity_check(const warped::WarpedSolitonData& data,
                                             std::span<const double> grid, double dt,
                                             double dr = 0.01);

/// log2(max residual at dt / max residual at dt/2).
double convergence_order(const PointwiseReport& coarse, const PointwiseReport& fine);

} // namespace gflow::entropy

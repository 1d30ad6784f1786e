#include "gflow/entropy/entropy.hpp"

#include "gflow/error.hpp"

#include <algorithm>
#include <cmath>

namespace gflow::entropy {

namespace {

constexpr double pi = std::numbers::pi;

void require_config(const EntropyConfig& c) {
  if (c.n != 3) throw InvalidInput("only n = 3 geometries are supported");
  if (!(c.mass0 > 0.0)) throw InvalidInput("initial mass must be positive");
  if (!(c.circle_length > 0.0)) throw InvalidInput("circle length must be positive");
}

double tau_at(const EntropyConfig& c, double t) {
  const double tau = c.T_ref - t;
  if (!(tau > 0.0)) throw InvalidInput("entropy needs tau = T_ref - t > 0");
  return tau;
}

double sup(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Sixth-order central first and second derivatives.
template <class F> std::pair<double, double> radial_derivatives(F&& v, double r, double dr) {
  const double m3 = v(r - 3 * dr), m2 = v(r - 2 * dr), m1 = v(r - dr), c = v(r),
               p1 = v(r + dr), p2 = v(r + 2 * dr), p3 = v(r + 3 * dr);
  const double d1 = (-m3 + 9 * m2 - 45 * m1 + 45 * p1 - 9 * p2 + p3) / (60 * dr);
  const double d2 =
      (2 * m3 - 27 * m2 + 270 * m1 - 490 * c + 270 * p1 - 27 * p2 + 2 * p3) / (180 * dr * dr);
  return {d1, d2};
}

// Dilation rate c with f' = c r on the grid; the pullback flow is then r (1 - t)^{-c}.
double dilation_rate(const warped::WarpedSolitonData& d, std::span<const double> grid) {
  const double probe = 0.5 * (d.f.r_lo() + d.f.r_hi()) + 0.25 * (d.f.r_hi() - d.f.r_lo());
  const double c = d.f.d1(probe) / probe;
  for (double r : grid)
    if (std::abs(d.f.d1(r) - c * r) > 1e-12 * std::max(1.0, std::abs(r)))
      throw InvalidInput("pullback family needs a potential with f' = c r");
  return c;
}

void require_unit_soliton(const warped::WarpedSolitonData& d, std::span<const double> grid,
                          double dt) {
  if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
  if (grid.empty()) throw InvalidInput("grid is empty");
  if (d.lambda_soliton != 1.0) throw InvalidInput("heat checks assume soliton constant 1");
  const auto conv = warped::convention_check(d);
  if (!conv.consistent) throw InvalidInput("soliton data fails convention_check: " + conv.message);
}

} // namespace

double volume(const cylinder::CylinderTrajectory& traj, double t, double circle_length) {
  const auto s = traj.sample(t);
  return 8.0 * pi * s.lambda * circle_length * s.beta;
}

double heat_weight(const cylinder::CylinderTrajectory& traj, double u0, double t) {
  if (!(u0 >= 0.0)) throw InvalidInput("heat weight needs u0 >= 0");
  return u0 * std::exp(traj.heat_exponent(t));
}

std::vector<HeatWeight> conjugate_heat_homogeneous(const cylinder::CylinderTrajectory& traj,
                                                   double u0, double T_ref, int n) {
  if (!(u0 >= 0.0)) throw InvalidInput("heat weight needs u0 >= 0");
  std::vector<HeatWeight> out;
  for (const auto& s : traj.steps) {
    if (!(s.t < T_ref)) break;
    HeatWeight w;
    w.t = s.t;
    w.tau = T_ref - s.t;
    w.u = heat_weight(traj, u0, s.t);
    w.f = -std::log(w.u) - 0.5 * n * std::log(4.0 * pi * w.tau);
    out.push_back(w);
  }
  return out;
}

double initial_weight(const cylinder::CylinderTrajectory& traj, const EntropyConfig& config) {
  require_config(config);
  return config.mass0 / volume(traj, traj.path.t_begin(), config.circle_length);
}

std::vector<double> mass(const cylinder::CylinderTrajectory& traj, double u0,
                         std::span<const double> times, double circle_length) {
  std::vector<double> out;
  out.reserve(times.size());
  for (double t : times) out.push_back(heat_weight(traj, u0, t) * volume(traj, t, circle_length));
  return out;
}

double mass_drift(const cylinder::CylinderTrajectory& traj, double u0, double circle_length,
                  double t_max) {
  std::vector<double> times;
  for (const auto& s : traj.steps)
    if (s.t < t_max) times.push_back(s.t);
  const auto m = mass(traj, u0, times, circle_length);
  double drift = 0.0;
  for (double x : m) drift = std::max(drift, std::abs(x - m.front()) / std::abs(m.front()));
  return drift;
}

double entropy_at(const cylinder::CylinderTrajectory& traj, const EntropyConfig& config,
                  double t) {
  const double tau = tau_at(config, t);
  const double u0 = initial_weight(traj, config);
  const auto s = traj.sample(t);
  const double u = heat_weight(traj, u0, t);
  const double m = u * 8.0 * pi * s.lambda * config.circle_length * s.beta;
  const double f = -std::log(u) - 1.5 * std::log(4.0 * pi * tau);
  return (tau * (1.0 / s.lambda - 0.5 * s.h * s.h) + f - 3.0) * m;
}

EntropyTrace entropy_eval(const cylinder::CylinderTrajectory& traj, const EntropyConfig& config,
                          std::span<const double> times) {
  EntropyTrace tr;
  for (double t : times) {
    tr.times.push_back(t);
    tr.tau.push_back(tau_at(config, t));
    tr.W.push_back(entropy_at(traj, config, t));
  }
  return tr;
}

double entropy_derivative_formula(const cylinder::CylinderTrajectory& traj,
                                  const EntropyConfig& config, double t) {
  const double tau = tau_at(config, t);
  const double u0 = initial_weight(traj, config);
  const auto s = traj.sample(t);
  const double h2 = s.h * s.h;
  const double m = heat_weight(traj, u0, t) * 8.0 * pi * s.lambda * config.circle_length * s.beta;
  const double a_s = 0.5 / s.lambda - 0.5 * h2 - 0.5 / tau;
  const double a_r = -0.5 * h2 - 0.5 / tau;
  return (2.0 * tau * (2.0 * a_s * a_s + a_r * a_r) - h2) * m;
}

EntropyTrace entropy_derivative_check(const cylinder::CylinderTrajectory& traj,
                                      const EntropyConfig& config, std::span<const double> times,
                                      double dt) {
  if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
  EntropyTrace tr = entropy_eval(traj, config, times);
  tr.dt = dt;
  tr.min_formula = std::numeric_limits<double>::infinity();
  for (double t : times) {
    const double fd = (entropy_at(traj, config, t + dt) - entropy_at(traj, config, t - dt)) /
                      (2.0 * dt);
    const double formula = entropy_derivative_formula(traj, config, t);
    tr.dW_fd.push_back(fd);
    tr.dW_formula.push_back(formula);
    tr.gap.push_back(std::abs(fd - formula));
    tr.min_formula = std::min(tr.min_formula, formula);
  }
  tr.max_gap = sup(tr.gap);
  tr.tolerance = std::max(1e-6, 10.0 * dt * dt * std::max(1.0, sup(tr.dW_formula)));
  tr.within_tolerance = tr.max_gap < tr.tolerance;
  return tr;
}

double measured_fd_order(const cylinder::CylinderTrajectory& traj, const EntropyConfig& config,
                         std::span<const double> times, double dt) {
  const double coarse = entropy_derivative_check(traj, config, times, dt).max_gap;
  const double fine = entropy_derivative_check(traj, config, times, 0.5 * dt).max_gap;
  return std::log2(coarse / fine);
}

std::vector<double> sample_times(const cylinder::CylinderTrajectory& traj,
                                 const EntropyConfig& config, double t_lo, double t_hi,
                                 std::size_t n, double dt) {
  if (n < 2) throw InvalidInput("need at least two sample times");
  if (!(t_lo - 2 * dt >= traj.path.t_begin() && t_hi + 2 * dt <= traj.path.t_end()))
    throw InvalidInput("sample window leaves the integrated range");
  if (!(t_hi + 2 * dt < config.T_ref)) throw InvalidInput("sample window reaches T_ref");
  return warped::linspace(t_lo, t_hi, n);
}

PointwiseReport soliton_heat_check(const warped::WarpedSolitonData& data,
                                   std::span<const double> grid, double dt) {
  require_unit_soliton(data, grid, dt);
  const double c = dilation_rate(data, grid);
  PointwiseReport rep;
  rep.dt = dt;
  for (double r : grid) {
    const double ahead = data.f.value(r * std::pow(1.0 - dt, -c));
    const double behind = data.f.value(r * std::pow(1.0 + dt, -c));
    const double lhs = (ahead - behind) / (2.0 * dt);
    const auto g = warped::point_geometry(data, r);
    const double rhs =
        -g.laplacian_f + g.grad_f_sq - g.scalar_curvature + 0.25 * g.h_norm_sq + 1.5;
    rep.grid.push_back(r);
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    rep.residual.push_back(std::abs(lhs - rhs));
  }
  rep.max_residual = sup(rep.residual);
  return rep;
}

PointwiseReport pointwise_monotonicity_check(const warped::WarpedSolitonData& data,
                                             std::span<const double> grid, double dt, double dr) {
  require_unit_soliton(data, grid, dt);
  if (!(dr > 0.0)) throw InvalidInput("dr must be positive");
  const double c = dilation_rate(data, grid);

  // v_t(r) = [V0(rho) + f0(rho) - 3] (4 pi (1 - t))^{-3/2} e^{-f0(rho)}, rho = r (1 - t)^{-c}:
  // the tau-weighted curvature terms are scale invariant along the soliton.
  auto v = [&](double t, double r) {
    const double rho = r * std::pow(1.0 - t, -c);
    const auto g = warped::point_geometry(data, rho);
    const double v0 = 2.0 * g.laplacian_f - g.grad_f_sq + g.scalar_curvature - g.h_norm_sq / 12.0;
    const double f = data.f.value(rho);
    return (v0 + f - 3.0) * std::pow(4.0 * pi * (1.0 - t), -1.5) * std::exp(-f);
  };

  PointwiseReport rep;
  rep.dt = dt;
  for (double r : grid) {
    const auto g = warped::point_geometry(data, r);
    const auto p = data.phi.jet(r);
    const double dv_dt = (v(dt, r) - v(-dt, r)) / (2.0 * dt);
    const auto [v1, v2] = radial_derivatives([&](double x) { return v(0.0, x); }, r, dr);
    const double lap = warped::radial_laplacian(p.value, p.d1, v1, v2);
    const double lhs = -dv_dt - lap + (g.scalar_curvature - 0.25 * g.h_norm_sq) * v(0.0, r);

    const double tau = 1.0;
    const double a_r = g.ric_radial - 0.25 * g.h2_radial + g.hess_f_radial - 0.5 / tau;
    const double a_s = g.ric_sphere - 0.25 * g.h2_sphere + g.hess_f_sphere - 0.5 / tau;
    const double u = std::pow(4.0 * pi * tau, -1.5) * std::exp(-data.f.value(r));
    const double rhs = -(2.0 * tau * (a_r * a_r + 2.0 * a_s * a_s) +
                         0.5 * tau * g.twisted_codiff_sq - g.h_norm_sq / 6.0) *
                       u;
    rep.grid.push_back(r);
    rep.lhs.push_back(lhs);
    rep.rhs.push_back(rhs);
    rep.residual.push_back(std::abs(lhs - rhs));
  }
  rep.max_residual = sup(rep.residual);
  return rep;
}

double convergence_order(const PointwiseReport& coarse, const PointwiseReport& fine) {
  return std::log2(coarse.max_residual / fine.max_residual);
}

} // namespace gflow::entropy

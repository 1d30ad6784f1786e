#include "gflow/cylinder/flow.hpp"

#include "gflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gflow::cylinder {

namespace {

constexpr double eps = std::numeric_limits<double>::epsilon();

// Integrated state is (lambda, u, beta, I, J) with u = 1/2 - lambda h^2 and the
// sign of h held fixed: u' = -2 h^2 u keeps the sign of u and the monotonicity
// of lambda h^2 exact per step, which (lambda, h) coordinates lose near T.
void field(double, std::span<const double> y, std::span<double> dy) {
  const double lam = y[0], u = y[1], beta = y[2];
  if (!(lam > 0.0)) {
    std::fill(dy.begin(), dy.end(), std::numeric_limits<double>::quiet_NaN());
    return;
  }
  const double h2 = (0.5 - u) / lam;
  dy[0] = -0.5 - u;
  dy[1] = -2.0 * h2 * u;
  dy[2] = 0.5 * h2 * beta;
  dy[3] = 6.0 * h2;
  dy[4] = (0.25 + 1.5 * u) / lam; // 1/lambda - (3/2) h^2
}

FlowStep make_step(double t, std::span<const double> y, double h_sign) {
  FlowStep s;
  s.t = t;
  s.lambda = y[0];
  s.u = y[1];
  s.lambda_h2 = 0.5 - y[1];
  s.h = std::copysign(std::sqrt(std::max(0.0, s.lambda_h2) / y[0]), h_sign);
  s.beta = y[2];
  s.torsion_integral = y[3];
  s.lambda_h_beta = s.lambda * s.h * s.beta;
  return s;
}

int sign_of(double u, double zero_band) {
  if (std::abs(u) <= zero_band) return 0;
  return u > 0.0 ? 1 : -1;
}

double round_off(double a, double b) { return 16.0 * eps * std::max(std::abs(a), std::abs(b)); }

} // namespace

std::array<double, 3> flow_rhs(const CylinderState& s) {
  if (!(s.lambda > 0.0)) throw InvalidInput("flow_rhs needs lambda > 0");
  const double h2 = s.h * s.h;
  return {-1.0 + s.lambda * h2, s.h / s.lambda - 1.5 * h2 * s.h, 0.5 * h2 * s.beta};
}

std::string to_string(Trend t) {
  switch (t) {
  case Trend::nondecreasing: return "nondecreasing";
  case Trend::nonincreasing: return "nonincreasing";
  case Trend::constant: return "constant";
  }
  return "unknown";
}

double CylinderTrajectory::heat_exponent(double t) const {
  if (!(t >= path.t_begin() && t <= path.t_end()))
    throw InvalidInput("sample time lies outside the integrated range");
  return path.component_at(t, 4);
}

FlowStep CylinderTrajectory::sample(double t) const {
  if (!(t >= path.t_begin() && t <= path.t_end()))
    throw InvalidInput("sample time lies outside the integrated range");
  const auto y = path.at(t);
  return make_step(t, y, initial.h);
}

CylinderTrajectory run_flow(const CylinderState& initial, const FlowOptions& options) {
  if (!(initial.lambda > 0.0) || !std::isfinite(initial.lambda))
    throw InvalidInput("initial lambda must be positive and finite");
  if (!(initial.beta > 0.0) || !std::isfinite(initial.beta))
    throw InvalidInput("initial beta must be positive and finite");
  if (!std::isfinite(initial.h)) throw InvalidInput("initial h must be finite");
  if (!(options.lambda_floor > 0.0 && options.lambda_floor < initial.lambda))
    throw InvalidInput("lambda floor must lie in (0, lambda0)");
  if (!(options.tmax > 0.0)) throw InvalidInput("tmax must be positive");

  ode::OdeProblem prob;
  prob.dimension = 5;
  prob.rhs = field;
  prob.t0 = 0.0;
  prob.state0 = {initial.lambda, 0.5 - initial.lambda * initial.h * initial.h, initial.beta, 0.0, 0.0};
  prob.tmax = options.tmax;
  const double floor = options.lambda_floor;
  const std::vector<ode::EventSpec> events{
      {[floor](double, std::span<const double> y) { return y[0] - floor; },
       ode::Direction::falling, true, "lambda floor"}};

  CylinderTrajectory out{initial, options,
                         ode::integrate(prob, events, {.rtol = options.rtol, .atol = options.atol}),
                         {}, std::nullopt, std::nullopt};
  const auto& path = out.path;
  out.steps.reserve(path.size());
  for (std::size_t i = 0; i < path.size(); ++i)
    out.steps.push_back(make_step(path.times()[i], path.states()[i], initial.h));

  if (const auto* hit = path.first_event(0); hit && path.termination() == ode::Termination::event) {
    out.t_floor = hit->time;
    const double slope = -0.5 - hit->state[1];
    // lambda is locally linear at the floor; a non-decreasing lambda cannot reach zero.
    if (slope < 0.0) out.t_sing = hit->time + hit->state[0] / -slope;
  }
  return out;
}

DiagnosticsReport diagnostics(const CylinderTrajectory& traj) {
  DiagnosticsReport rep;
  const auto& steps = traj.steps;
  if (steps.empty()) return rep;
  const double c0 = steps.front().lambda_h_beta;
  const double band = 64.0 * eps;
  const int s0 = sign_of(steps.front().u, band);
  rep.expected_trend = s0 > 0 ? Trend::nondecreasing : s0 < 0 ? Trend::nonincreasing
                                                             : Trend::constant;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& s = steps[i];
    rep.conservation_drift = std::max(rep.conservation_drift, std::abs(s.lambda_h_beta - c0));
    if (sign_of(s.u, band) * s0 < 0 || (s0 == 0 && sign_of(s.u, band) != 0))
      rep.sign_preserved = false;
    if (i == 0) continue;
    const double a = steps[i - 1].lambda_h2, b = s.lambda_h2;
    double against = 0.0;
    switch (rep.expected_trend) {
    case Trend::nondecreasing: against = a - b; break;
    case Trend::nonincreasing: against = b - a; break;
    case Trend::constant: against = std::abs(b - steps.front().lambda_h2); break;
    }
    if (against > round_off(a, b)) {
      rep.monotone = false;
      rep.monotonicity_violation = std::max(rep.monotonicity_violation, against);
    }
  }

  const double t_lo = traj.path.t_begin(), t_hi = traj.path.t_end();
  for (std::size_t i = 1; i + 1 < steps.size(); ++i) {
    const double t = steps[i].t;
    const double d = std::min(1e-3, 1e-3 * std::min(t - t_lo, t_hi - t));
    if (!(d > 0.0)) continue;
    // (lambda h^2)' = -u'; differencing u keeps its full relative precision.
    auto u = [&](double tt) { return traj.path.component_at(tt, 1); };
    const double fd = (u(t + 2 * d) - 8 * u(t + d) + 8 * u(t - d) - u(t - 2 * d)) / (12 * d);
    const double h2 = steps[i].h * steps[i].h;
    const double exact = h2 - 2.0 * steps[i].lambda * h2 * h2;
    rep.identity_error =
        std::max(rep.identity_error, std::abs(fd - exact) / std::max(1.0, std::abs(exact)));
  }
  return rep;
}

BlowupReport blowup_analysis(const CylinderTrajectory& traj, int n_samples,
                             double opening_threshold, double limit_tolerance) {
  if (!traj.t_sing) throw InvalidInput("blowup analysis needs a detected singular time");
  if (n_samples < 3) throw InvalidInput("blowup analysis needs at least 3 samples");
  BlowupReport rep;
  rep.opening_threshold = opening_threshold;
  rep.ricci_flow_case = traj.initial.h == 0.0;
  const double T = *traj.t_sing, t0 = traj.path.t_begin();
  for (int i = 1; i <= n_samples; ++i) {
    const double t = T - std::ldexp(T - t0, -i);
    if (!(t < traj.path.t_end())) break;
    const auto s = traj.sample(t);
    rep.samples.push_back({t, s.lambda_h2, s.beta * s.beta / s.lambda});
  }
  if (rep.samples.size() < 3) throw InvalidInput("fewer than 3 usable blowup samples");

  // Aitken extrapolation: Richardson with the ratio measured from the data.
  auto aitken = [&](std::size_t k, double& ratio) {
    const double x0 = rep.samples[k - 2].lambda_h2, x1 = rep.samples[k - 1].lambda_h2,
                 x2 = rep.samples[k].lambda_h2;
    const double d1 = x1 - x0, d2 = x2 - x1;
    if (d2 - d1 == 0.0 || d1 == 0.0) {
      ratio = 0.0;
      return x2;
    }
    ratio = d2 / d1;
    return x2 - d2 * d2 / (d2 - d1);
  };
  const std::size_t last = rep.samples.size() - 1;
  rep.limit = aitken(last, rep.convergence_ratio);
  if (last >= 3) {
    double r = 0.0;
    rep.limit_error = std::abs(rep.limit - aitken(last - 1, r));
  } else {
    rep.limit_error = std::abs(rep.samples[last].lambda_h2 - rep.samples[last - 1].lambda_h2);
  }
  rep.limit_is_half = !rep.ricci_flow_case && std::abs(rep.limit - 0.5) <= limit_tolerance;

  rep.opening_increasing = true;
  for (std::size_t i = 0; i < rep.samples.size(); ++i) {
    if (i > 0 && !(rep.samples[i].opening > rep.samples[i - 1].opening))
      rep.opening_increasing = false;
    if (!rep.opening_crossing && rep.samples[i].opening > opening_threshold)
      rep.opening_crossing = rep.samples[i].t;
  }
  return rep;
}

DivergenceReport torsion_divergence(const CylinderTrajectory& traj, std::optional<double> psi0,
                                    std::size_t n_samples, double fit_depth) {
  if (traj.initial.h == 0.0)
    throw InvalidInput("h0 = 0: the torsion integral vanishes identically, no divergence witness");
  if (!traj.t_sing) throw InvalidInput("torsion divergence needs a detected singular time");
  if (n_samples < 8) throw InvalidInput("torsion divergence needs at least 8 samples");
  if (!(fit_depth > 0.0 && fit_depth < 0.1)) throw InvalidInput("fit depth must lie in (0, 0.1)");

  DivergenceReport rep;
  const double T = *traj.t_sing, t0 = traj.path.t_begin(), span = T - t0;
  rep.window_lo = fit_depth * span;
  rep.window_hi = 10.0 * rep.window_lo;
  if (!(T - rep.window_lo < traj.path.t_end()))
    throw InvalidInput("fit window reaches beyond the integrated range");

  const double decades = -std::log10(fit_depth);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t m = 0;
  for (std::size_t j = 0; j < n_samples; ++j) {
    const double gap = span * std::pow(10.0, -decades * static_cast<double>(j) /
                                                 static_cast<double>(n_samples - 1));
    const double t = j == 0 ? t0 : T - gap;
    const double I = traj.path.component_at(t, 3);
    rep.times.push_back(t);
    rep.integral.push_back(I);
    if (gap <= rep.window_hi * (1.0 + 1e-12)) {
      const double x = -std::log(gap);
      sx += x, sy += I, sxx += x * x, sxy += x * I;
      ++m;
    }
  }
  if (m < 2) throw InvalidInput("too few samples inside the fit window");
  const double md = static_cast<double>(m);
  rep.coefficient = (md * sxy - sx * sy) / (md * sxx - sx * sx);

  if (psi0) {
    rep.psi0 = psi0;
    auto g = [&](double t) { return traj.path.component_at(t, 3) - *psi0; };
    double lo = t0, hi = traj.path.t_end();
    if (g(lo) >= 0.0) {
      rep.crossing_time = lo;
    } else if (g(hi) >= 0.0) {
      // I is increasing, so bisection brackets the unique crossing.
      while (hi - lo > 4.0 * eps * std::max(1.0, std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        (g(mid) < 0.0 ? lo : hi) = mid;
      }
      rep.crossing_time = 0.5 * (lo + hi);
    }
  }
  return rep;
}

CylinderState ricci_flow_solution(double t, double beta0) { return {1.0 - t, 0.0, beta0}; }

CylinderState balanced_solution(double t, double beta0, double h_sign) {
  return {1.0 - 0.5 * t, std::copysign(1.0 / std::sqrt(2.0 - t), h_sign),
          beta0 / std::sqrt(1.0 - 0.5 * t)};
}

} // namespace gflow::cylinder

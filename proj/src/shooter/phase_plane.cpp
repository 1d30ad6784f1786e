#include "gflow/shooter/phase_plane.hpp"

#include "gflow/error.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace gflow::shooter {

namespace {

void field(double, std::span<const double> y, std::span<double> dy) {
  const double u = y[0];
  dy[0] = y[1];
  dy[1] = u > 0.0 ? 0.75 * (1.0 / std::cbrt(u) - u) : std::numeric_limits<double>::quiet_NaN();
}

ode::OdeProblem phase_problem(const PhaseState& start, double r_end) {
  if (!(start.u > 0.0)) throw InvalidInput("phase flow needs u > 0 at the start");
  if (!(r_end > start.r)) throw InvalidInput("phase flow end must lie beyond the start");
  ode::OdeProblem prob;
  prob.dimension = 2;
  prob.rhs = field;
  prob.t0 = start.r;
  prob.state0 = {start.u, start.p};
  prob.tmax = r_end;
  return prob;
}

double invariant(double u, double p) {
  const double u23 = std::cbrt(u * u);
  return 3.0 * u * u + 4.0 * p * p - 9.0 * u23;
}

} // namespace

std::array<double, 2> phase_rhs(const PhaseState& s) {
  if (!(s.u > 0.0)) throw InvalidInput("phase_rhs is singular for u <= 0");
  return {s.p, 0.75 * (1.0 / std::cbrt(s.u) - s.u)};
}

double orbit_invariant(const PhaseState& s) {
  if (!(s.u >= 0.0)) throw InvalidInput("orbit invariant needs u >= 0");
  return invariant(s.u, s.p);
}

PhaseState series_start(double r_switch) {
  if (!(r_switch > 0.0 && r_switch <= 0.1))
    throw InvalidInput("series start radius must lie in (0, 0.1]");
  const double r = r_switch;
  const double r2 = r * r;
  double phi = 0.0, dphi = 0.0;
  // Horner in r^2 over the odd coefficients.
  const auto& c = origin_series;
  phi = r * (1.0 + r2 * (c[0] + r2 * (c[1] + r2 * (c[2] + r2 * c[3]))));
  dphi = 1.0 + r2 * (3 * c[0] + r2 * (5 * c[1] + r2 * (7 * c[2] + r2 * 9 * c[3])));
  const double root = std::sqrt(phi);
  return {r, phi * root, 1.5 * root * dphi};
}

ShootingRun shoot_from(const PhaseState& start, const ShootingOptions& opts) {
  if (!(opts.u_floor > 0.0)) throw InvalidInput("u_floor must be positive");
  const auto prob = phase_problem(start, opts.r_max);
  const double floor = opts.u_floor;
  const std::vector<ode::EventSpec> events{
      {[](double, std::span<const double> y) { return y[0] - 1.0; }, ode::Direction::rising,
       false, "u=1 rising"},
      {[](double, std::span<const double> y) { return y[1]; }, ode::Direction::falling, false,
       "p=0 falling"},
      {[](double, std::span<const double> y) { return y[0] - 1.0; }, ode::Direction::falling,
       false, "u=1 falling"},
      {[floor](double, std::span<const double> y) { return y[0] - floor; },
       ode::Direction::falling, true, "u=floor"},
  };

  ShootingRun run{{}, ode::integrate(prob, events, {.rtol = opts.rtol, .atol = opts.atol})};
  ShootingReport& rep = run.report;
  const auto& traj = run.trajectory;
  rep.termination = traj.termination();

  // Milestones in order: each one is the first matching event after the previous.
  double after = -std::numeric_limits<double>::infinity();
  std::array<std::optional<double>*, 4> slots{&rep.r1, &rep.r2, &rep.r3, &rep.r4};
  for (std::size_t id = 0; id < 4; ++id) {
    for (const auto& e : traj.events()) {
      if (e.event_id == id && e.time > after) {
        *slots[id] = e.time;
        after = e.time;
        if (id == 1) rep.u_max = e.state[0];
        break;
      }
    }
    if (!slots[id]->has_value()) break;
  }

  rep.invariant_initial = invariant(start.u, start.p);
  double drift = 0.0;
  for (const auto& s : traj.states())
    drift = std::max(drift, std::abs(invariant(s[0], s[1]) - rep.invariant_initial));
  rep.invariant_drift = drift;
  if (!rep.r2) {
    double m = 0.0;
    for (const auto& s : traj.states()) m = std::max(m, s[0]);
    rep.u_max = m;
  }
  rep.u_terminal = traj.states().back()[0];
  rep.p_terminal = traj.states().back()[1];
  rep.terminated_at_zero = traj.termination() == ode::Termination::event && rep.r4.has_value();
  return run;
}

ShootingRun shoot_r3_branch_run(const ShootingOptions& opts) {
  return shoot_from(series_start(opts.r_switch), opts);
}

ode::Trajectory phase_flow(const PhaseState& start, double r_end, const ShootingOptions& opts) {
  return ode::integrate(phase_problem(start, r_end), {.rtol = opts.rtol, .atol = opts.atol});
}

warped::RadialProfile phi_profile(const ode::Trajectory& traj, double spacing) {
  if (!(spacing > 0.0)) throw InvalidInput("sampling spacing must be positive");
  std::vector<double> r, v, d1, d2;
  const double lo = traj.t_begin(), hi = traj.t_end();
  const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / spacing));
  for (std::size_t i = 0; i <= n; ++i) {
    const double ri = i == n ? hi : lo + static_cast<double>(i) * spacing;
    if (!r.empty() && !(ri > r.back())) continue;
    const auto s = traj.at(ri);
    const double u = s[0], p = s[1];
    if (!(u > 0.0)) continue;
    const double phi = std::cbrt(u * u);
    const double dphi = 2.0 / 3.0 * p / std::cbrt(u);
    r.push_back(ri);
    v.push_back(phi);
    d1.push_back(dphi);
    d2.push_back((1.0 - phi * phi - dphi * dphi) / (2.0 * phi));
  }
  return warped::RadialProfile::sampled(std::move(r), std::move(v), std::move(d1), std::move(d2));
}

} // namespace gflow::shooter

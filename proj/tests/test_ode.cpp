#include <doctest.h>

#include "gflow/error.hpp"
#include "gflow/ode/integrator.hpp"

#include <cmath>
#include <numbers>
#include <vector>

using namespace gflow::ode;

namespace {

OdeProblem scalar_problem(std::function<double(double, double)> g, double y0, double tmax) {
  OdeProblem p;
  p.dimension = 1;
  p.rhs = [g](double t, std::span<const double> y, std::span<double> dy) { dy[0] = g(t, y[0]); };
  p.t0 = 0.0;
  p.state0 = {y0};
  p.tmax = tmax;
  return p;
}

// Nonlinear pendulum, used where no closed form is available.
OdeProblem pendulum(double tmax) {
  OdeProblem p;
  p.dimension = 2;
  p.rhs = [](double, std::span<const double> y, std::span<double> dy) {
    dy[0] = y[1];
    dy[1] = -std::sin(y[0]);
  };
  p.state0 = {1.2, 0.0};
  p.tmax = tmax;
  return p;
}

// Fixed-step classical RK4 with step doubling and Richardson extrapolation.
// Test-only reference, independent of the adaptive integrator.
State rk4_reference(const OdeProblem& p, int steps) {
  auto run = [&](int nsteps) {
    const double h = (p.tmax - p.t0) / nsteps;
    State y = p.state0;
    const std::size_t n = y.size();
    State k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (int s = 0; s < nsteps; ++s) {
      const double t = p.t0 + s * h;
      p.rhs(t, y, k1);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
      p.rhs(t + 0.5 * h, tmp, k2);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
      p.rhs(t + 0.5 * h, tmp, k3);
      for (std::size_t i = 0; i < n; ++i) tmp[i] = y[i] + h * k3[i];
      p.rhs(t + h, tmp, k4);
      for (std::size_t i = 0; i < n; ++i)
        y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    return y;
  };
  const State coarse = run(steps);
  const State fine = run(2 * steps);
  State out(coarse.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = (16.0 * fine[i] - coarse[i]) / 15.0;
  return out;
}

double max_diff(const State& a, const State& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

} // namespace

TEST_CASE("linear decay reaches 1 - t") {
  auto p = scalar_problem([](double, double) { return -1.0; }, 1.0, 0.9);
  const auto traj = integrate(p, {.rtol = 1e-10, .atol = 1e-12});
  CHECK(traj.termination() == Termination::reached_tmax);
  CHECK(traj.component_at(0.5, 0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(traj.states().back()[0] == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("zero right-hand side keeps the state") {
  OdeProblem p;
  p.dimension = 3;
  p.rhs = [](double, std::span<const double>, std::span<double> dy) {
    for (double& v : dy) v = 0.0;
  };
  p.state0 = {1.5, -2.0, 0.25};
  p.tmax = 10.0;
  const auto traj = integrate(p, {});
  for (const auto& s : traj.states()) CHECK(s == p.state0);
  CHECK(traj.at(3.3) == p.state0);
}

TEST_CASE("event on exponential growth located at t = 1") {
  auto p = scalar_problem([](double, double y) { return y; }, 1.0, 3.0);
  std::vector<EventSpec> ev{
      {[](double, std::span<const double> y) { return y[0] - std::numbers::e; },
       Direction::rising, true, "x=e"}};
  const auto traj = integrate(p, ev, {.rtol = 1e-12, .atol = 1e-14});
  REQUIRE(traj.termination() == Termination::event);
  REQUIRE(traj.events().size() == 1);
  CHECK(std::abs(traj.events()[0].time - 1.0) < 1e-9);
  CHECK(traj.t_end() == traj.events()[0].time);
}

TEST_CASE("event direction filter") {
  // sin(t) crosses zero falling at pi and rising at 2 pi.
  OdeProblem p = scalar_problem([](double t, double) { return std::cos(t); }, 0.0, 7.0);
  std::vector<EventSpec> ev{
      {[](double, std::span<const double> y) { return y[0]; }, Direction::rising, false, "up"},
      {[](double, std::span<const double> y) { return y[0]; }, Direction::falling, false, "down"}};
  const auto traj = integrate(p, ev, {.rtol = 1e-12, .atol = 1e-14});
  REQUIRE(traj.events().size() == 2);
  CHECK(traj.events()[0].event_id == 1);
  CHECK(traj.events()[0].time == doctest::Approx(std::numbers::pi).epsilon(1e-10));
  CHECK(traj.events()[1].event_id == 0);
  CHECK(traj.events()[1].time == doctest::Approx(2 * std::numbers::pi).epsilon(1e-10));
  CHECK(traj.termination() == Termination::reached_tmax);
}

TEST_CASE("event time brackets a sign change of the dense interpolant") {
  const auto p = pendulum(20.0);
  std::vector<EventSpec> ev{
      {[](double, std::span<const double> y) { return y[1]; }, Direction::any, false, "v=0"}};
  const auto traj = integrate(p, ev, {.rtol = 1e-10, .atol = 1e-12});
  REQUIRE(traj.events().size() >= 4);
  for (const auto& e : traj.events()) {
    const double dt = 1e-7;
    const double before = traj.component_at(e.time - dt, 1);
    const double after = traj.component_at(e.time + dt, 1);
    CHECK(before * after < 0.0);
  }
}

TEST_CASE("tightening tolerances does not increase error against the RK4 reference") {
  const auto p = pendulum(10.0);
  const State ref = rk4_reference(p, 20000);
  double previous = 1e300;
  for (double tol : {1e-6, 5e-7, 2.5e-7, 1e-8, 5e-9, 1e-10}) {
    const auto traj = integrate(p, {.rtol = tol, .atol = tol});
    const double err = max_diff(traj.states().back(), ref);
    CHECK(err <= previous * 1.05);
    previous = err;
  }
  CHECK(previous < 1e-9);
}

TEST_CASE("backward integration returns to the initial state") {
  const auto p = pendulum(5.0);
  const IntegratorOptions opt{.rtol = 1e-10, .atol = 1e-10};
  const auto fwd = integrate(p, opt);
  REQUIRE(fwd.termination() == Termination::reached_tmax);
  const auto back = integrate(time_reversed(p.rhs, p.tmax, fwd.states().back(), p.t0), opt);
  REQUIRE(back.termination() == Termination::reached_tmax);
  CHECK(max_diff(back.states().back(), p.state0) < 10 * 1e-10 * 10);
}

TEST_CASE("blowup ceiling terminates the run") {
  auto p = scalar_problem([](double, double y) { return y; }, 1.0, 40.0);
  const auto traj = integrate(p, {.rtol = 1e-8, .atol = 1e-8});
  CHECK(traj.termination() == Termination::blowup);
  CHECK(traj.states().back()[0] > 1e12);
  CHECK(traj.t_end() == doctest::Approx(std::log(1e12)).epsilon(1e-2));
}

TEST_CASE("finite-time wall gives step_underflow, not a hang") {
  // y = sqrt(1 - t): the slope diverges at t = 1 and the field is undefined beyond.
  auto p = scalar_problem([](double, double y) { return y > 0.0 ? -0.5 / y : NAN; }, 1.0, 2.0);
  const auto traj = integrate(p, {.rtol = 1e-10, .atol = 1e-12});
  CHECK(traj.termination() == Termination::step_underflow);
  CHECK(traj.t_end() < 1.0 + 1e-6);
  CHECK(traj.t_end() > 0.999);
}

TEST_CASE("runs are bit-reproducible") {
  const auto p = pendulum(30.0);
  const auto a = integrate(p, {.rtol = 1e-9, .atol = 1e-9});
  const auto b = integrate(p, {.rtol = 1e-9, .atol = 1e-9});
  CHECK(a.times() == b.times());
  CHECK(a.states() == b.states());
}

TEST_CASE("precondition violations are rejected") {
  auto p = scalar_problem([](double, double) { return 0.0; }, 1.0, 0.0);
  CHECK_THROWS_AS(integrate(p, {}), gflow::InvalidInput);
  p.tmax = 2.0;
  CHECK_THROWS_AS(integrate(p, {.rtol = 0.0, .atol = 1e-9}), gflow::InvalidInput);
  p.state0 = {1.0, 2.0};
  CHECK_THROWS_AS(integrate(p, {}), gflow::InvalidInput);
}

#include <doctest.h>

#include "gflow/entropy/entropy.hpp"
#include "gflow/error.hpp"

#include <cmath>
#include <numbers>
#include <random>

using namespace gflow;
using namespace gflow::entropy;

namespace {

constexpr double pi = std::numbers::pi;

cylinder::CylinderTrajectory run_h2(double h2) {
  return cylinder::run_flow({1.0, std::sqrt(h2), 1.0});
}

} // namespace

TEST_CASE("homogeneous conjugate heat weights match closed forms") {
  const auto bal = run_h2(0.5);
  const auto rf = run_h2(0.0);
  for (double t = 0.0; t < 1.9; t += 0.05) {
    CHECK(heat_weight(bal, 2.0, t) ==
          doctest::Approx(2.0 * std::sqrt(2.0 / (2.0 - t))).epsilon(1e-10));
    if (t < 0.9) CHECK(heat_weight(rf, 2.0, t) == doctest::Approx(2.0 / (1.0 - t)).epsilon(1e-10));
    CHECK(heat_weight(bal, 0.0, t) == 0.0);
  }
  const auto ws = conjugate_heat_homogeneous(bal, 1.0, 2.0);
  REQUIRE(!ws.empty());
  for (const auto& w : ws) {
    CHECK(w.u > 0.0);
    CHECK(std::pow(4 * pi * w.tau, -1.5) * std::exp(-w.f) == doctest::Approx(w.u).epsilon(1e-13));
  }
  CHECK_THROWS_AS(conjugate_heat_homogeneous(bal, -1.0, 2.0), InvalidInput);
}

TEST_CASE("mass is conserved along every run") {
  for (double h2 : {0.0, 0.05, 0.1, 0.3, 0.5, 0.7, 1.5}) {
    CAPTURE(h2);
    const auto traj = run_h2(h2);
    const double stop = traj.t_sing ? *traj.t_sing - 1e-3 : traj.path.t_end();
    CHECK(mass_drift(traj, 1.0, 2 * pi, stop) < 1e-9);
  }
  // h0 = 0: V = 8 pi L0 (1 - t) and u = u0 / (1 - t).
  const auto rf = run_h2(0.0);
  const std::vector<double> times{0.0, 0.3, 0.6, 0.9};
  for (double m : mass(rf, 0.25, times, 2 * pi))
    CHECK(m == doctest::Approx(0.25 * 16 * pi * pi).epsilon(1e-10));
}

TEST_CASE("entropy values on the closed-form branches") {
  const auto rf = run_h2(0.0);
  EntropyConfig cfg;
  cfg.T_ref = 1.0;
  CHECK(entropy_at(rf, cfg, 0.0) ==
        doctest::Approx(std::log(16 * pi * pi) - 1.5 * std::log(4 * pi) - 2.0).epsilon(1e-13));

  // T_ref = 2 on the balanced branch: tau (1/lambda - h^2/2) = 3/2 exactly and
  // f = -ln u0 - (1/2) ln(2/(2 - t)) - (3/2) ln(4 pi (2 - t)).
  const auto bal = run_h2(0.5);
  cfg.T_ref = 2.0;
  cfg.mass0 = 3.0;
  const double u0 = initial_weight(bal, cfg);
  CHECK(u0 == doctest::Approx(3.0 / (16 * pi * pi)));
  for (double t : {0.0, 0.5, 1.0, 1.5, 1.9}) {
    const double f = -std::log(u0) - 0.5 * std::log(2.0 / (2.0 - t)) -
                     1.5 * std::log(4 * pi * (2.0 - t));
    CHECK(entropy_at(bal, cfg, t) == doctest::Approx((1.5 + f - 3.0) * 3.0).epsilon(1e-10));
  }
  CHECK_THROWS_AS(entropy_at(bal, cfg, 2.0), InvalidInput);
  cfg.T_ref = 1.0;
  CHECK_THROWS_AS(entropy_at(bal, cfg, 1.5), InvalidInput);
}

TEST_CASE("finite-difference derivative agrees with the reduced formula") {
  const auto bal = run_h2(0.5);
  EntropyConfig cfg;
  cfg.T_ref = 2.0;
  const auto times = sample_times(bal, cfg, 0.01, 1.5, 60, 1e-4);
  const auto tr = entropy_derivative_check(bal, cfg, times, 1e-4);
  CHECK(tr.max_gap < 1e-6);
  CHECK(tr.within_tolerance);
  // On this branch dW/dt = m / tau.
  for (std::size_t i = 0; i < times.size(); ++i)
    CHECK(tr.dW_formula[i] == doctest::Approx(1.0 / (2.0 - times[i])).epsilon(1e-9));

  const double order = measured_fd_order(bal, cfg, sample_times(bal, cfg, 0.1, 1.5, 30, 0.04),
                                         0.04);
  CHECK(order >= 1.8);
  CHECK(order <= 2.2);

  const auto mid = run_h2(0.1);
  cfg.T_ref = *mid.t_sing;
  const auto mt = sample_times(mid, cfg, 0.01, cfg.T_ref - 0.3, 40, 1e-4);
  CHECK(entropy_derivative_check(mid, cfg, mt, 1e-4).max_gap < 1e-6);
}

TEST_CASE("Ricci flow case is monotone") {
  const auto rf = run_h2(0.0);
  EntropyConfig cfg;
  cfg.T_ref = 1.0;
  const auto tr = entropy_derivative_check(rf, cfg, sample_times(rf, cfg, 0.01, 0.8, 50, 1e-4),
                                           1e-4);
  CHECK(tr.min_formula >= 0.0);
  CHECK(tr.max_gap < 1e-6);
}

TEST_CASE("reduced derivative is a sum of squares for homogeneous weights") {
  // With x = 1/(2 tau), s = 1/(2 lambda), k = h^2/2:
  // x dW/m = 2 (s - k - x)^2 + k^2 + x^2.
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> h2d(0.01, 2.0), tref(0.5, 4.0);
  for (int trial = 0; trial < 10; ++trial) {
    const double h2 = h2d(rng);
    const auto traj = run_h2(h2);
    EntropyConfig cfg;
    cfg.T_ref = traj.t_sing ? *traj.t_sing + tref(rng) - 0.5 : tref(rng);
    const double t_hi = std::min(traj.path.t_end(), cfg.T_ref) * 0.9;
    for (double t : warped::linspace(0.0, t_hi, 20)) {
      const auto s = traj.sample(t);
      const double x = 0.5 / (cfg.T_ref - t), sv = 0.5 / s.lambda, k = 0.5 * s.h * s.h;
      const double m = mass(traj, initial_weight(traj, cfg), std::vector<double>{t},
                            cfg.circle_length)[0];
      const double squares = 2 * (sv - k - x) * (sv - k - x) + k * k + x * x;
      CHECK(x * entropy_derivative_formula(traj, cfg, t) / m ==
            doctest::Approx(squares).epsilon(1e-9));
      CHECK(entropy_derivative_formula(traj, cfg, t) > 0.0);
    }
  }
}

TEST_CASE("soliton heat identity on the explicit solitons") {
  const auto cyl = warped::cylinder_soliton(6.0);
  const auto grid = warped::linspace(-5.0, 5.0, 101);
  const auto a = soliton_heat_check(cyl, grid, 1e-4);
  CHECK(a.max_residual < 1e-6);
  const auto b = soliton_heat_check(cyl, grid, 5e-5);
  CHECK(convergence_order(a, b) == doctest::Approx(2.0).epsilon(0.05));
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(a.rhs[i] == doctest::Approx(grid[i] * grid[i]).epsilon(1e-12).scale(1.0));

  const auto gauss = warped::gaussian_shrinker(10.0);
  const auto gg = warped::linspace(0.05, 5.0, 100);
  CHECK(soliton_heat_check(gauss, gg, 1e-4).max_residual < 1e-6);

  CHECK_THROWS_AS(soliton_heat_check(cyl, grid, 0.0), InvalidInput);
  auto bad = cyl;
  bad.lambda_soliton = 0.5;
  CHECK_THROWS_AS(soliton_heat_check(bad, grid, 1e-4), InvalidInput);
}

TEST_CASE("pointwise monotonicity identity on the explicit solitons") {
  const auto cyl = warped::cylinder_soliton(6.0);
  const auto grid = warped::linspace(-3.0, 3.0, 61);
  const auto a = pointwise_monotonicity_check(cyl, grid, 1e-4);
  CHECK(a.max_residual < 1e-5);
  const auto b = pointwise_monotonicity_check(cyl, grid, 5e-5);
  CHECK(convergence_order(a, b) == doctest::Approx(2.0).epsilon(0.1));
  // On the cylinder the right-hand side reduces to (1 - r^2) u.
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double r = grid[i];
    const double u = std::pow(4 * pi, -1.5) * std::exp(-0.5 * r * r);
    CHECK(a.rhs[i] == doctest::Approx((1 - r * r) * u).epsilon(1e-12).scale(1e-3));
  }

  const auto gauss = warped::gaussian_shrinker(10.0);
  const auto g = pointwise_monotonicity_check(gauss, warped::linspace(0.1, 3.0, 59), 1e-4);
  CHECK(g.max_residual < 1e-6);
  for (double v : g.rhs) CHECK(std::abs(v) < 1e-14);
}

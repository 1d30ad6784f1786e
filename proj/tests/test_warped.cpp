#include <doctest.h>

#include "gflow/error.hpp"
#include "gflow/warped/soliton.hpp"

#include <cmath>
#include <random>

using namespace gflow::warped;

namespace {

double sup(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

RadialProfile sine_profile(double lo, double hi) {
  return RadialProfile::closed_form([](double r) { return 2.0 + std::sin(r); },
                                    [](double r) { return std::cos(r); },
                                    [](double r) { return -std::sin(r); }, lo, hi);
}

} // namespace

TEST_CASE("cylinder soliton solves the ODE system exactly") {
  const auto d = cylinder_soliton();
  const auto rep = ode_residuals(d, linspace(-4.9, 4.9, 200));
  CHECK(rep.max_abs == 0.0);
  CHECK(rep.r1.size() == 200);
}

TEST_CASE("Gaussian shrinker solves the ODE system") {
  const auto d = gaussian_shrinker();
  const auto rep = ode_residuals(d, linspace(0.1, 5.0, 200));
  CHECK(rep.max_abs < 1e-12);
}

TEST_CASE("cubic perturbation of the potential breaks the soliton") {
  auto d = cylinder_soliton();
  d.f = RadialProfile::closed_form([](double r) { return 0.5 * r * r + 0.01 * r * r * r; },
                                   [](double r) { return r + 0.03 * r * r; },
                                   [](double r) { return 1.0 + 0.06 * r; }, -5.0, 5.0);
  const auto grid = linspace(-4.0, 4.0, 81);
  const auto rep = ode_residuals(d, grid);
  CHECK(rep.max_abs > 0.0);
  // phi = 1 kills every phi-derivative, so R2 = f'' - 1 = 0.06 r exactly.
  for (std::size_t i = 0; i < grid.size(); ++i)
    CHECK(rep.r2[i] == doctest::Approx(0.06 * grid[i]).epsilon(1e-12).scale(1.0));
}

TEST_CASE("tensor residuals vanish on the explicit solitons") {
  CHECK(tensor_residuals(cylinder_soliton(), linspace(-4.9, 4.9, 200)).max_abs < 1e-14);
  CHECK(tensor_residuals(gaussian_shrinker(), linspace(0.1, 5.0, 200)).max_abs < 1e-12);
}

TEST_CASE("torsion amplitude 1.1 shifts every metric eigenvalue by 0.21") {
  auto d = cylinder_soliton();
  d.h = RadialProfile::constant(1.1, -5.0, 5.0);
  const auto rep = tensor_residuals(d, linspace(-4.0, 4.0, 50));
  for (double v : rep.tensor_metric_residual) CHECK(v == doctest::Approx(0.21).epsilon(1e-12));
  CHECK(sup(rep.tensor_torsion_residual) < 1e-14);
}

TEST_CASE("convention check enforces lambda_soliton = 2 lambda_ode") {
  const auto good = convention_check(cylinder_soliton());
  CHECK(good.consistent);
  CHECK(convention_check(gaussian_shrinker()).consistent);

  auto bad = cylinder_soliton();
  bad.lambda_soliton = 0.5;
  const auto rep = convention_check(bad);
  CHECK_FALSE(rep.consistent);
  CHECK(rep.ode_max < 1e-14);
  CHECK(rep.tensor_max == doctest::Approx(0.5));
  CHECK(rep.message.find("lambda_soliton") != std::string::npos);
}

TEST_CASE("top-form contractions give |H|^2 = 6h^2 and H^2 = 2h^2 g") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);
  for (int k = 0; k < 50; ++k) {
    const double h = dist(rng);
    const auto c = top_form_contractions(h);
    CHECK(c.norm_sq == doctest::Approx(6.0 * h * h).epsilon(1e-15));
    for (double e : c.h2_eigenvalues) CHECK(e == doctest::Approx(2.0 * h * h).epsilon(1e-15));
  }
}

TEST_CASE("combined equation equals 2 R1 + R2 + R3/h for constant h") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> coef(-0.5, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    const double a = coef(rng), b = coef(rng), c = coef(rng), hc = 0.5 + std::abs(coef(rng));
    WarpedSolitonData d;
    d.phi = RadialProfile::closed_form([=](double r) { return 1.5 + a * std::sin(r); },
                                       [=](double r) { return a * std::cos(r); },
                                       [=](double r) { return -a * std::sin(r); }, -3, 3);
    d.h = RadialProfile::constant(hc, -3, 3);
    d.f = RadialProfile::quadratic(0.0, b, c, -3, 3);
    d.lambda_ode = 0.5 + coef(rng);
    const auto grid = linspace(-2.5, 2.5, 41);
    const auto rep = ode_residuals(d, grid);
    const auto comb = combined_residual(d, grid);
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(comb[i] == doctest::Approx(2 * rep.r1[i] + rep.r2[i] + rep.r3[i] / hc)
                           .epsilon(1e-12)
                           .scale(1.0));
  }
  // and on soliton data the combined residual vanishes
  const auto d = cylinder_soliton();
  CHECK(sup(combined_residual(d, linspace(-4, 4, 20))) == 0.0);
}

TEST_CASE("normalize_phi scalings") {
  auto s = normalize_phi(0.5, 1.0);
  CHECK(s.a == doctest::Approx(1.0));
  CHECK(s.b == doctest::Approx(1.0));
  s = normalize_phi(2.0, 0.0);
  CHECK(s.a == doctest::Approx(1.0));
  s = normalize_phi(0.5, 0.0);
  CHECK(s.a == doctest::Approx(2.0));
  CHECK(s.b == doctest::Approx(0.5));
  CHECK(s.a * s.a * s.b * s.b == doctest::Approx(1.0));
  CHECK_THROWS_AS(normalize_phi(-1.0, 0.5), gflow::InvalidInput);
  CHECK_THROWS_AS(normalize_phi(0.0, 0.0), gflow::InvalidInput);

  // phi = 2 solves 2 - 2phi'^2 - 4phi phi'' = phi^2/2; it normalizes to psi = 1.
  const auto phi = RadialProfile::constant(2.0, -1.0, 1.0);
  WarpedSolitonData d{phi, RadialProfile::constant(0.0, -1, 1), RadialProfile::constant(0, -1, 1),
                      0.5, 1.0};
  CHECK(sup(combined_residual(d, linspace(-0.9, 0.9, 11))) == 0.0);
  const auto psi = normalized_profile(phi, s);
  CHECK(sup(normalized_equation_residual(psi, linspace(-0.4, 0.4, 11))) < 1e-15);
}

TEST_CASE("normalize then denormalize is the identity") {
  const auto phi = sine_profile(-3.0, 3.0);
  const auto s = normalize_phi(0.3, 0.7);
  const auto back = denormalized_profile(normalized_profile(phi, s), s);
  CHECK(back.r_lo() == doctest::Approx(-3.0));
  for (double r : linspace(-2.9, 2.9, 101)) {
    CHECK(std::abs(back.value(r) - phi.value(r)) < 1e-12);
    CHECK(std::abs(back.d1(r) - phi.d1(r)) < 1e-12);
    CHECK(std::abs(back.d2(r) - phi.d2(r)) < 1e-12);
  }
}

TEST_CASE("quintic Hermite sampling") {
  // Degree-5 polynomials are reproduced exactly.
  auto poly = [](double r) { return 1 - 2 * r + 0.5 * r * r * r - 0.1 * std::pow(r, 5); };
  auto dpoly = [](double r) { return -2 + 1.5 * r * r - 0.5 * std::pow(r, 4); };
  auto ddpoly = [](double r) { return 3 * r - 2 * r * r * r; };
  std::vector<double> nodes = linspace(-1, 2, 4), v, dv, ddv;
  for (double r : nodes) {
    v.push_back(poly(r));
    dv.push_back(dpoly(r));
    ddv.push_back(ddpoly(r));
  }
  const auto p = RadialProfile::sampled(nodes, v, dv, ddv);
  for (double r : linspace(-1, 2, 37)) {
    CHECK(p.value(r) == doctest::Approx(poly(r)).epsilon(1e-12));
    CHECK(p.d1(r) == doctest::Approx(dpoly(r)).epsilon(1e-11));
    CHECK(p.d2(r) == doctest::Approx(ddpoly(r)).epsilon(1e-10));
  }

  // Smooth non-polynomial data: derivatives consistent with values.
  nodes = linspace(0, 6, 121);
  v.clear(), dv.clear(), ddv.clear();
  for (double r : nodes) {
    v.push_back(2 + std::sin(r));
    dv.push_back(std::cos(r));
    ddv.push_back(-std::sin(r));
  }
  const auto s = RadialProfile::sampled(nodes, v, dv, ddv);
  CHECK(s.is_sampled());
  CHECK(s.consistency_error(linspace(0.5, 5.5, 50), 1e-3) < 1e-6);
  CHECK(std::abs(s.value(1.2345) - (2 + std::sin(1.2345))) < 1e-10);
}

TEST_CASE("domain violations are rejected") {
  const auto d = gaussian_shrinker();
  const std::vector<double> bad{0.0, 1.0};
  CHECK_THROWS_AS(ode_residuals(d, bad), gflow::InvalidInput);
  CHECK_THROWS_AS(tensor_residuals(d, std::vector<double>{11.0}), gflow::InvalidInput);
  CHECK_THROWS_AS(RadialProfile::sampled({0, 0}, {1, 1}, {0, 0}, {0, 0}), gflow::InvalidInput);
}

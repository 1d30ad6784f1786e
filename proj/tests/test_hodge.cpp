#include <doctest.h>

#include "gflow/error.hpp"
#include "gflow/hodge/identities.hpp"

#include <cmath>

using namespace gflow;
using namespace gflow::hodge;

namespace {

double sup_diff(const Form& a, const Form& b) { return sup_norm(subtract(a, b)); }

Form from_partials(const PeriodicGrid& g, const Potential& f) {
  const auto n = static_cast<std::size_t>(g.dim());
  Form df = Form::zero(g, 1);
  std::array<double, 4> pt{}, dp{};
  for (std::size_t i = 0; i < g.points(); ++i) {
    g.coordinates(i, std::span(pt.data(), n));
    f.partials(std::span<const double>(pt.data(), n), std::span(dp.data(), n));
    for (std::size_t a = 0; a < n; ++a) df.comps[a][i] = dp[a];
  }
  return df;
}

PeriodicGrid skewed(int dim) {
  std::vector<std::size_t> sizes(static_cast<std::size_t>(dim), 16);
  std::vector<double> periods{2.0, 3.0, 5.0, 4.0}, metric{1.5, 0.7, 2.3, 1.1};
  periods.resize(sizes.size());
  metric.resize(sizes.size());
  return PeriodicGrid(dim, sizes, periods, metric);
}

} // namespace

TEST_CASE("grid and form preconditions") {
  CHECK_THROWS_AS(PeriodicGrid::cube(2, 16), InvalidInput);
  CHECK_THROWS_AS(PeriodicGrid::cube(3, 8), InvalidInput);
  CHECK_THROWS_AS(PeriodicGrid(3, {16, 16, 16}, {}, {1.0, -1.0, 1.0}), InvalidInput);
  const auto g = PeriodicGrid::cube(3, 16);
  CHECK_THROWS_AS(d(g, Form::zero(g, 3)), InvalidInput);
  CHECK_THROWS_AS(codiff(g, Form::zero(g, 0)), InvalidInput);
  CHECK_THROWS_AS(add(Form::zero(g, 1), Form::zero(g, 2)), InvalidInput);
  CHECK_THROWS_AS(wedge(g, Form::zero(g, 2), Form::zero(g, 2)), InvalidInput);
  CHECK_THROWS_AS(check_suobing(g, cosine_potential(1), Form::zero(g, 2)), InvalidInput);
  CHECK(multi_indices(4, 2).size() == 6);
  CHECK(multi_indices(4, 3)[1] == std::vector<int>{0, 1, 3});
}

TEST_CASE("d squares to zero") {
  for (int dim : {3, 4}) {
    const auto g = skewed(dim);
    for (int k = 0; k + 2 <= dim; ++k) {
      CAPTURE(dim);
      CAPTURE(k);
      const Form w = random_trig_form(g, k, 10 + static_cast<std::uint64_t>(k));
      CHECK(sup_norm(d(g, d(g, w))) < 1e-10);
    }
  }
}

TEST_CASE("hodge star is an involution up to sign") {
  for (int dim : {3, 4}) {
    const auto g = skewed(dim);
    for (int k = 0; k <= dim; ++k) {
      CAPTURE(dim);
      CAPTURE(k);
      const Form w = random_trig_form(g, k, 20 + static_cast<std::uint64_t>(k));
      const double sign = (k * (dim - k)) % 2 == 0 ? 1.0 : -1.0;
      CHECK(sup_diff(hodge::hodge(g, hodge::hodge(g, w)), scale(w, sign)) < 1e-12);
    }
  }
}

TEST_CASE("codifferential is the L2 adjoint of d") {
  for (int dim : {3, 4}) {
    for (const auto& g : {skewed(dim), PeriodicGrid::cube(dim, 16)}) {
      for (int k = 0; k < dim; ++k) {
        CAPTURE(dim);
        CAPTURE(k);
        const Form a = random_trig_form(g, k, 30 + static_cast<std::uint64_t>(k));
        const Form b = random_trig_form(g, k + 1, 40 + static_cast<std::uint64_t>(k));
        CHECK(adjointness_gap(g, a, b) < 1e-8);
      }
    }
  }
}

TEST_CASE("interior product and the gradient identity on the T3 example") {
  const auto g = PeriodicGrid::cube(3, 32);
  const auto f = cosine_potential(1);
  const Form H = sine_three_form(g);
  std::vector<std::function<double(std::span<const double>)>> zero(3, [](auto) { return 0.0; });
  zero[1] = [](std::span<const double> x) { return std::sin(x[0]) * std::sin(x[1]); };
  const Form expected = Form::sample(g, 2, zero); // sin x sin y dx^dz

  VectorField x(3, Field(g.points(), 0.0));
  x[1] = g.sample([](std::span<const double> p) { return -std::sin(p[1]); });
  CHECK(sup_diff(interior(g, x, H), expected) < 1e-15);
  // With the exact df both sides are algebraic in the samples.
  const Form rhs = hodge::hodge(g, wedge(g, from_partials(g, f), hodge::hodge(g, H)));
  CHECK(sup_diff(rhs, expected) < 1e-15);

  CHECK(check_suobing(g, cosine_potential(1, 0.0, 2.5), H) == 0.0);
  CHECK(check_suobing(g, f, H, GradientMode::discrete) < 1e-15);
}

TEST_CASE("identity residuals converge at fourth order on T3") {
  const auto f = cosine_potential(1);
  const auto c = PeriodicGrid::cube(3, 32), fgrid = PeriodicGrid::cube(3, 64);
  const Form Hc = sine_three_form(c), Hf = sine_three_form(fgrid);

  const double s32 = check_suobing(c, f, Hc), s64 = check_suobing(fgrid, f, Hf);
  CHECK(s64 == doctest::Approx(3.093e-6).epsilon(0.01));
  CHECK(convergence_rate(s32, s64) == doctest::Approx(4.0).epsilon(0.1));

  const auto t32 = check_twisted_codiff(c, f, Hc), t64 = check_twisted_codiff(fgrid, f, Hf);
  CHECK(convergence_rate(t32.first, t64.first) == doctest::Approx(4.0).epsilon(0.1));
  CHECK(convergence_rate(t32.second, t64.second) == doctest::Approx(4.0).epsilon(0.1));

  const auto i32 = check_integral_identity(c, f, Hc), i64 = check_integral_identity(fgrid, f, Hf);
  CHECK(i64.relative_gap < 1e-6);
  CHECK(convergence_rate(i32.relative_gap, i64.relative_gap) == doctest::Approx(4.0).epsilon(0.1));

  const double d32 = check_divH2(c, Hc), d64 = check_divH2(fgrid, Hf);
  CHECK(convergence_rate(d32, d64) == doctest::Approx(4.0).epsilon(0.1));
  // Leading stencil error of D(h^2) - 2h D(h) for h = sin x.
  const double dx = fgrid.spacing(0);
  CHECK(d64 == doctest::Approx(std::pow(dx, 4) * 16.0 / 30.0).epsilon(0.1));
}

TEST_CASE("identity residuals converge at fourth order on T4") {
  const auto f = cosine_potential(3);
  const auto c = PeriodicGrid::cube(4, 16), fgrid = PeriodicGrid::cube(4, 32);
  const Form Hc = closed_t4_three_form(c), Hf = closed_t4_three_form(fgrid);
  CHECK(sup_norm(d(fgrid, Hf)) < 1e-10);
  CHECK(convergence_rate(check_suobing(c, f, Hc), check_suobing(fgrid, f, Hf)) ==
        doctest::Approx(4.0).epsilon(0.15));
  const auto t16 = check_twisted_codiff(c, f, Hc), t32 = check_twisted_codiff(fgrid, f, Hf);
  CHECK(convergence_rate(t16.first, t32.first) == doctest::Approx(4.0).epsilon(0.15));
  CHECK(convergence_rate(t16.second, t32.second) == doctest::Approx(4.0).epsilon(0.15));
  CHECK(convergence_rate(check_divH2(c, Hc), check_divH2(fgrid, Hf)) ==
        doctest::Approx(4.0).epsilon(0.15));

  // sin x dx^dy^dz with f = cos w: both sides vanish identically.
  CHECK(check_suobing(c, f, sine_three_form(c)) < 1e-15);
}

TEST_CASE("shifting f and scaling H") {
  const auto g = PeriodicGrid::cube(3, 32);
  const Form H = sine_three_form(g);
  const auto f = cosine_potential(1), fs = cosine_potential(1, 1.0, 0.7);
  CHECK(check_suobing(g, fs, H) == doctest::Approx(check_suobing(g, f, H)).epsilon(1e-12));
  const auto a = check_twisted_codiff(g, f, H), b = check_twisted_codiff(g, fs, H);
  CHECK(b.first == doctest::Approx(a.first).epsilon(1e-6));
  CHECK(b.second == doctest::Approx(a.second).epsilon(1e-6));

  const auto ia = check_integral_identity(g, f, H), ib = check_integral_identity(g, fs, H);
  CHECK(ib.lhs == doctest::Approx(ia.lhs * std::exp(-0.7)).epsilon(1e-12));
  CHECK(ib.rhs == doctest::Approx(ia.rhs * std::exp(-0.7)).epsilon(1e-12));

  const auto i2 = check_integral_identity(g, f, scale(H, 2.0));
  CHECK(i2.lhs == doctest::Approx(4.0 * ia.lhs).epsilon(1e-14));
  CHECK(i2.rhs == doctest::Approx(4.0 * ia.rhs).epsilon(1e-14));
}

TEST_CASE("degenerate inputs") {
  const auto g = PeriodicGrid::cube(4, 16);
  const auto zero_f = cosine_potential(3, 0.0);
  const Form H = closed_t4_three_form(g);
  const auto t = check_twisted_codiff(g, zero_f, H);
  CHECK(t.first < 1e-13);
  CHECK(t.second < 1e-12);

  // Constant-coefficient H is harmonic.
  Form c = Form::zero(g, 3);
  for (auto& comp : c.comps) std::fill(comp.begin(), comp.end(), 0.8);
  const auto ic = check_integral_identity(g, zero_f, c);
  CHECK(std::abs(ic.lhs) < 1e-20);
  CHECK(std::abs(ic.rhs) < 1e-20);
  CHECK(check_divH2(g, c) < 1e-13);

  const Form open = Form::sample(g, 3, {[](std::span<const double> x) { return std::sin(x[3]); },
                                        [](auto) { return 0.0; }, [](auto) { return 0.0; },
                                        [](auto) { return 0.0; }});
  CHECK_THROWS_AS(check_twisted_codiff(g, zero_f, open), InvalidInput);
  CHECK_THROWS_AS(check_integral_identity(g, zero_f, open), InvalidInput);
  CHECK_THROWS_AS(convergence_rate(0.0, 1.0), NumericalFailure);
}

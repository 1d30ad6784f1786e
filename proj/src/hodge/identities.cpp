#include "gflow/hodge/identities.hpp"

#include "gflow/error.hpp"

#include <cmath>
#include <algorithm>
#include <numbers>
#include <random>

namespace gflow::hodge {

namespace {

VectorField grad_field(const PeriodicGrid& g, const Potential& f, const Field& fv,
                       GradientMode mode) {
  if (mode == GradientMode::discrete) return gradient(g, fv);
  const auto n = static_cast<std::size_t>(g.dim());
  VectorField x(n, Field(g.points()));
  std::array<double, 4> pt{}, dp{};
  for (std::size_t i = 0; i < g.points(); ++i) {
    g.coordinates(i, std::span(pt.data(), n));
    f.partials(std::span<const double>(pt.data(), n), std::span(dp.data(), n));
    for (std::size_t a = 0; a < n; ++a) x[a][i] = dp[a] / g.metric(static_cast<int>(a));
  }
  return x;
}

Field exp_field(const Field& u, double sign) {
  Field out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out[i] = std::exp(sign * u[i]);
  return out;
}

void require_three_form(const PeriodicGrid& g, const Form& H) {
  if (H.degree != 3) throw InvalidInput("H must be a 3-form");
  if (H.comps.size() != multi_indices(g.dim(), 3).size())
    throw InvalidInput("H does not match the grid dimension");
}

void require_closed(const PeriodicGrid& g, const Form& H, double tol) {
  if (H.degree == g.dim()) return;
  const double dh = sup_norm(d(g, H));
  if (dh > tol * std::max(1.0, sup_norm(H)))
    throw InvalidInput("H is not closed: sup|dH| = " + std::to_string(dh));
}

// e^f d*(e^{-f} H) and d*H + i_X H, the two sides of the twisted identity.
struct TwistedSides {
  Form lhs;
  Form rhs;
};

TwistedSides twisted_sides(const PeriodicGrid& g, const Field& fv, const VectorField& x,
                           const Form& H) {
  Form lhs = add(codiff(g, H), interior(g, x, H));
  Form rhs = multiply(exp_field(fv, 1.0), codiff(g, multiply(exp_field(fv, -1.0), H)));
  return {std::move(lhs), std::move(rhs)};
}

// Delta_d H + L_X H with every term computed, including the ones dH kills.
Form laplace_plus_lie(const PeriodicGrid& g, const VectorField& x, const Form& H) {
  Form out = add(d(g, codiff(g, H)), d(g, interior(g, x, H)));
  if (H.degree < g.dim()) {
    const Form dH = d(g, H);
    out = add(out, add(codiff(g, dH), interior(g, x, dH)));
  }
  return out;
}

} // namespace

double check_suobing(const PeriodicGrid& g, const Potential& f, const Form& H, GradientMode mode) {
  require_three_form(g, H);
  const Field fv = g.sample(f.value);
  const Form lhs = interior(g, grad_field(g, f, fv, mode), H);
  const Form df = d(g, Form::scalar(fv));
  const Form rhs = hodge(g, wedge(g, df, hodge(g, H)));
  return sup_norm(subtract(lhs, rhs));
}

TwistedCodiffResidual check_twisted_codiff(const PeriodicGrid& g, const Potential& f,
                                           const Form& H, GradientMode mode, double closed_tol) {
  require_three_form(g, H);
  require_closed(g, H, closed_tol);
  const Field fv = g.sample(f.value);
  const VectorField x = grad_field(g, f, fv, mode);
  TwistedCodiffResidual r;
  Form rhs_first;
  {
    auto sides = twisted_sides(g, fv, x, H);
    r.first = sup_norm(subtract(sides.lhs, sides.rhs));
    rhs_first = std::move(sides.rhs);
  }
  r.second = sup_norm(subtract(laplace_plus_lie(g, x, H), d(g, rhs_first)));
  return r;
}

IntegralIdentity check_integral_identity(const PeriodicGrid& g, const Potential& f, const Form& H,
                                         GradientMode mode, double closed_tol) {
  require_three_form(g, H);
  require_closed(g, H, closed_tol);
  const Field fv = g.sample(f.value);
  const VectorField x = grad_field(g, f, fv, mode);
  const Field w = exp_field(fv, -1.0);
  IntegralIdentity out;
  {
    const Form t = add(codiff(g, H), interior(g, x, H));
    out.lhs = l2_inner(g, t, t, &w);
  }
  out.rhs = l2_inner(g, laplace_plus_lie(g, x, H), H, &w);
  const double scale = std::max(std::abs(out.lhs), std::abs(out.rhs));
  out.relative_gap = scale > 0.0 ? std::abs(out.lhs - out.rhs) / scale : 0.0;
  return out;
}

double check_divH2(const PeriodicGrid& g, const Form& H) {
  require_three_form(g, H);
  const int n = g.dim();
  const std::size_t N = g.points();
  std::vector<double> inv(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) inv[static_cast<std::size_t>(a)] = 1.0 / g.metric(a);

  // Raw contractions: H^2_ij = H_ipq H_j^pq, |H|^2 = H_ijk H^ijk.
  std::vector<Field> h2(static_cast<std::size_t>(n * n), Field(N, 0.0));
  Field norm(N, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) {
          const std::array<int, 3> a{i, p, q}, b{j, p, q};
          const auto [fa, sa] = component(H, n, a);
          const auto [fb, sb] = component(H, n, b);
          if (sa == 0 || sb == 0) continue;
          const double c = sa * sb * inv[static_cast<std::size_t>(p)] * inv[static_cast<std::size_t>(q)];
          auto& out = h2[static_cast<std::size_t>(i * n + j)];
          for (std::size_t s = 0; s < N; ++s) out[s] += c * (*fa)[s] * (*fb)[s];
        }
  for (int i = 0; i < n; ++i) {
    const auto& hii = h2[static_cast<std::size_t>(i * n + i)];
    for (std::size_t s = 0; s < N; ++s) norm[s] += inv[static_cast<std::size_t>(i)] * hii[s];
  }

  const Form dstar = codiff(g, H);
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    Field res(N, 0.0);
    for (int j = 0; j < n; ++j) {
      const Field dj = g.partial(h2[static_cast<std::size_t>(i * n + j)], j);
      for (std::size_t s = 0; s < N; ++s) res[s] += inv[static_cast<std::size_t>(j)] * dj[s];
    }
    const Field dn = g.partial(norm, i);
    for (std::size_t s = 0; s < N; ++s) res[s] -= dn[s] / 6.0;
    for (int m = 0; m < n; ++m)
      for (int k = 0; k < n; ++k) {
        const std::array<int, 2> mn{m, k};
        const std::array<int, 3> imn{i, m, k};
        const auto [fd, sd] = component(dstar, n, mn);
        const auto [fh, sh] = component(H, n, imn);
        if (sd == 0 || sh == 0) continue;
        const double c = sd * sh * inv[static_cast<std::size_t>(m)] * inv[static_cast<std::size_t>(k)];
        for (std::size_t s = 0; s < N; ++s) res[s] += c * (*fd)[s] * (*fh)[s];
      }
    worst = std::max(worst, sup_norm(res));
  }
  return worst;
}

double adjointness_gap(const PeriodicGrid& g, const Form& alpha, const Form& beta) {
  if (beta.degree != alpha.degree + 1) throw InvalidInput("beta must have degree k + 1");
  return std::abs(l2_inner(g, d(g, alpha), beta) - l2_inner(g, alpha, codiff(g, beta)));
}

double convergence_rate(double coarse, double fine) {
  if (!(coarse > 0.0 && fine > 0.0)) throw NumericalFailure("convergence rate needs positive residuals");
  return std::log2(coarse / fine);
}

Potential cosine_potential(int axis, double amplitude, double shift) {
  const auto a = static_cast<std::size_t>(axis);
  return {[=](std::span<const double> x) { return amplitude * std::cos(x[a]) + shift; },
          [=](std::span<const double> x, std::span<double> d) {
            std::fill(d.begin(), d.end(), 0.0);
            d[a] = -amplitude * std::sin(x[a]);
          }};
}

Form sine_three_form(const PeriodicGrid& g) {
  Form H = Form::zero(g, 3);
  const std::array<int, 3> xyz{0, 1, 2};
  H.at(xyz, g.dim()) = g.sample([](std::span<const double> x) { return std::sin(x[0]); });
  return H;
}

Form closed_t4_three_form(const PeriodicGrid& g) {
  if (g.dim() != 4) throw InvalidInput("closed_t4_three_form needs a 4-dimensional grid");
  // beta = sin x dy^dz + cos w sin y dx^dz + sin(z + w) dx^dy + cos x sin w dy^dw
  Form beta = Form::zero(g, 2);
  auto set = [&](int a, int b, std::function<double(std::span<const double>)> fn) {
    const std::array<int, 2> ab{a, b};
    beta.at(ab, 4) = g.sample(fn);
  };
  set(1, 2, [](std::span<const double> x) { return std::sin(x[0]); });
  set(0, 2, [](std::span<const double> x) { return std::cos(x[3]) * std::sin(x[1]); });
  set(0, 1, [](std::span<const double> x) { return std::sin(x[2] + x[3]); });
  set(1, 3, [](std::span<const double> x) { return std::cos(x[0]) * std::sin(x[3]); });
  return d(g, beta);
}

Form random_trig_form(const PeriodicGrid& g, int k, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.0, 1.0), phase(0.0, 2.0 * std::numbers::pi);
  std::uniform_int_distribution<int> wave(-2, 2);
  const auto n = static_cast<std::size_t>(g.dim());
  std::vector<std::function<double(std::span<const double>)>> fns;
  for (std::size_t c = 0; c < multi_indices(g.dim(), k).size(); ++c) {
    std::vector<std::array<double, 6>> modes; // amplitude, phase, wave numbers
    for (int m = 0; m < 3; ++m) {
      std::array<double, 6> md{amp(rng), phase(rng), 0, 0, 0, 0};
      for (std::size_t a = 0; a < n; ++a) {
        // Integer wave numbers in units of the period keep the data periodic.
        md[2 + a] = wave(rng) * 2.0 * std::numbers::pi / g.period(static_cast<int>(a));
      }
      modes.push_back(md);
    }
    fns.push_back([modes, n](std::span<const double> x) {
      double v = 0.0;
      for (const auto& md : modes) {
        double arg = md[1];
        for (std::size_t a = 0; a < n; ++a) arg += md[2 + a] * x[a];
        v += md[0] * std::sin(arg);
      }
      return v;
    });
  }
  return Form::sample(g, k, fns);
}

} // namespace gflow::hodge

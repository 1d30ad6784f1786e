#include "gflow/warped/soliton.hpp"

#include "gflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace gflow::warped {

namespace {

void require_in_domain(const WarpedSolitonData& d, std::span<const double> grid) {
  for (double r : grid) {
    const bool inside = r > d.phi.r_lo() && r < d.phi.r_hi() && r > d.h.r_lo() &&
                        r < d.h.r_hi() && r > d.f.r_lo() && r < d.f.r_hi();
    if (!inside) {
      std::ostringstream os;
      os << "grid point r=" << r << " lies outside the open profile domain";
      throw InvalidInput(os.str());
    }
    if (!(d.phi.value(r) > 0.0)) throw InvalidInput("warping function must be positive");
  }
}

double sup(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

int levi_civita(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

} // namespace

TopFormContractions top_form_contractions(double h) {
  double H[3][3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) H[i][j][k] = h * levi_civita(i, j, k);
  TopFormContractions out{};
  for (int i = 0; i < 3; ++i) {
    double s = 0.0;
    for (int p = 0; p < 3; ++p)
      for (int q = 0; q < 3; ++q) s += H[i][p][q] * H[i][p][q];
    out.h2_eigenvalues[static_cast<std::size_t>(i)] = s;
  }
  double n = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) n += H[i][j][k] * H[i][j][k];
  out.norm_sq = n;
  return out;
}

double radial_laplacian(double phi, double dphi, double du, double ddu) {
  return ddu + 2.0 * (dphi / phi) * du;
}

PointGeometry point_geometry(const WarpedSolitonData& data, double r) {
  const auto p = data.phi.jet(r);
  const auto h = data.h.jet(r);
  const auto f = data.f.jet(r);
  const auto tc = top_form_contractions(h.value);

  PointGeometry g{};
  g.ric_radial = -2.0 * p.d2 / p.value;
  g.ric_sphere = (1.0 - p.d1 * p.d1 - p.value * p.d2) / (p.value * p.value);
  g.scalar_curvature = g.ric_radial + 2.0 * g.ric_sphere;
  g.hess_f_radial = f.d2;
  g.hess_f_sphere = p.d1 * f.d1 / p.value;
  g.laplacian_f = g.hess_f_radial + 2.0 * g.hess_f_sphere;
  g.grad_f_sq = f.d1 * f.d1;
  g.h2_radial = tc.h2_eigenvalues[0];
  g.h2_sphere = tc.h2_eigenvalues[1];
  g.h_norm_sq = tc.norm_sq;
  // e^f d*(e^{-f} H) = -(h' - f' h) phi^2 vol_{S^2}: a single orthonormal
  // component, counted twice by the raw contraction.
  const double w = h.d1 - f.d1 * h.value;
  g.twisted_codiff_sq = 2.0 * w * w;
  return g;
}

ResidualReport ode_residuals(const WarpedSolitonData& data, std::span<const double> grid) {
  require_in_domain(data, grid);
  ResidualReport rep;
  rep.grid.assign(grid.begin(), grid.end());
  const double lam = data.lambda_ode;
  for (double r : grid) {
    const auto p = data.phi.jet(r);
    const auto h = data.h.jet(r);
    const auto f = data.f.jet(r);
    const double phi2 = p.value * p.value;
    const double hh = h.value * h.value;

    const double r1 = (1.0 - p.d1 * p.d1 - p.value * p.d2) -
                      (lam * phi2 - p.value * p.d1 * f.d1 + 0.5 * hh * phi2);
    const double r2 = (-2.0 * p.value * p.d2) - ((lam - f.d2) * phi2 + 0.5 * hh * phi2);
    // (phi^2 h')' and (f' h phi^2)' expanded with the product rule.
    const double lhs3 = 2.0 * p.value * p.d1 * h.d1 + phi2 * h.d2;
    const double flux_d = f.d2 * h.value * phi2 + f.d1 * h.d1 * phi2 +
                          2.0 * f.d1 * h.value * p.value * p.d1;
    const double r3 = lhs3 - (-2.0 * lam * h.value * phi2 + flux_d);
    rep.r1.push_back(r1);
    rep.r2.push_back(r2);
    rep.r3.push_back(r3);
  }
  rep.max_abs = std::max({sup(rep.r1), sup(rep.r2), sup(rep.r3)});
  return rep;
}

ResidualReport tensor_residuals(const WarpedSolitonData& data, std::span<const double> grid) {
  require_in_domain(data, grid);
  ResidualReport rep;
  rep.grid.assign(grid.begin(), grid.end());
  const double lam = data.lambda_soliton;
  for (double r : grid) {
    const PointGeometry g = point_geometry(data, r);
    // 2 Ric - H^2/2 - lambda g + 2 Hess f, one eigenvalue per frame direction.
    const double radial = 2.0 * g.ric_radial - 0.5 * g.h2_radial - lam + 2.0 * g.hess_f_radial;
    const double sphere = 2.0 * g.ric_sphere - 0.5 * g.h2_sphere - lam + 2.0 * g.hess_f_sphere;
    rep.tensor_metric_residual.push_back(std::max(std::abs(radial), std::abs(sphere)));

    // Delta_d H + L_{grad f} H = d(e^f d*(e^{-f} H)) for closed H. In the
    // warped frame *(e^{-f} H) = e^{-f} h, d of that is (e^{-f} h)' dr and
    // *dr = phi^2 vol_{S^2}, so e^f d*(e^{-f} H) = -(h' - f' h) phi^2 vol_{S^2}
    // and d of it is -[(h' - f' h) phi^2]' / phi^2 times dV.
    const auto p = data.phi.jet(r);
    const auto h = data.h.jet(r);
    const auto f = data.f.jet(r);
    const double w = h.d1 - f.d1 * h.value;
    const double dw = h.d2 - f.d2 * h.value - f.d1 * h.d1;
    const double lhs = -(dw + 2.0 * w * p.d1 / p.value);
    rep.tensor_torsion_residual.push_back(std::abs(lhs - lam * h.value));
  }
  rep.max_abs = std::max(sup(rep.tensor_metric_residual), sup(rep.tensor_torsion_residual));
  return rep;
}

std::vector<double> combined_residual(const WarpedSolitonData& data,
                                      std::span<const double> grid) {
  require_in_domain(data, grid);
  std::vector<double> out;
  out.reserve(grid.size());
  for (double r : grid) {
    const auto p = data.phi.jet(r);
    const double h = data.h.value(r);
    out.push_back(2.0 - 2.0 * p.d1 * p.d1 - 4.0 * p.value * p.d2 -
                  (data.lambda_ode + 1.5 * h * h) * p.value * p.value);
  }
  return out;
}

std::vector<double> normalized_equation_residual(const RadialProfile& phi,
                                                 std::span<const double> grid) {
  std::vector<double> out;
  out.reserve(grid.size());
  for (double r : grid) {
    const auto p = phi.jet(r);
    out.push_back(p.value * p.value + p.d1 * p.d1 + 2.0 * p.value * p.d2 - 1.0);
  }
  return out;
}

ConventionReport convention_check(const WarpedSolitonData& data, std::span<const double> grid,
                                  double tolerance) {
  ConventionReport rep;
  rep.tolerance = tolerance;
  rep.ode_max = ode_residuals(data, grid).max_abs;
  rep.tensor_max = tensor_residuals(data, grid).max_abs;
  const bool ode_ok = rep.ode_max <= tolerance;
  const bool tensor_ok = rep.tensor_max <= tolerance;
  rep.consistent = ode_ok && tensor_ok;
  std::ostringstream os;
  if (rep.consistent) {
    os << "consistent: ODE residual " << rep.ode_max << " with lambda_ode=" << data.lambda_ode
       << ", tensor residual " << rep.tensor_max << " with lambda_soliton="
       << data.lambda_soliton;
  } else {
    if (!ode_ok)
      os << "ODE system fails with lambda_ode=" << data.lambda_ode << " (residual "
         << rep.ode_max << "). ";
    if (!tensor_ok)
      os << "tensor equations fail with lambda_soliton=" << data.lambda_soliton
         << " (residual " << rep.tensor_max << "). ";
    if (ode_ok && !tensor_ok && std::abs(data.lambda_soliton - 2.0 * data.lambda_ode) > 0.0)
      os << "lambda_soliton differs from 2*lambda_ode=" << 2.0 * data.lambda_ode << ".";
  }
  rep.message = os.str();
  return rep;
}

ConventionReport convention_check(const WarpedSolitonData& data, double tolerance) {
  return convention_check(data, interior_grid(data, 200), tolerance);
}

Scaling normalize_phi(double lambda_ode, double h_const) {
  const double k = lambda_ode + 1.5 * h_const * h_const;
  if (!(k > 0.0) || !std::isfinite(k))
    throw InvalidInput("normalization needs lambda + 3/2 h^2 > 0");
  const double a = std::sqrt(2.0 / k);
  return {a, 1.0 / a};
}

RadialProfile normalized_profile(const RadialProfile& phi, Scaling s) {
  const double a = s.a, b = s.b;
  return RadialProfile::closed_form([phi, a, b](double r) { return phi.value(r / b) / a; },
                                    [phi, a, b](double r) { return phi.d1(r / b) / (a * b); },
                                    [phi, a, b](double r) { return phi.d2(r / b) / (a * b * b); },
                                    phi.r_lo() * b, phi.r_hi() * b);
}

RadialProfile denormalized_profile(const RadialProfile& psi, Scaling s) {
  const double a = s.a, b = s.b;
  return RadialProfile::closed_form([psi, a, b](double r) { return a * psi.value(b * r); },
                                    [psi, a, b](double r) { return a * b * psi.d1(b * r); },
                                    [psi, a, b](double r) { return a * b * b * psi.d2(b * r); },
                                    psi.r_lo() / b, psi.r_hi() / b);
}

WarpedSolitonData cylinder_soliton(double r_extent) {
  WarpedSolitonData d;
  d.phi = RadialProfile::constant(1.0, -r_extent, r_extent);
  d.h = RadialProfile::constant(1.0, -r_extent, r_extent);
  d.f = RadialProfile::quadratic(0.0, 0.0, 0.5, -r_extent, r_extent);
  d.lambda_ode = 0.5;
  d.lambda_soliton = 1.0;
  return d;
}

WarpedSolitonData gaussian_shrinker(double r_max) {
  WarpedSolitonData d;
  d.phi = RadialProfile::quadratic(0.0, 1.0, 0.0, 0.0, r_max);
  d.h = RadialProfile::constant(0.0, 0.0, r_max);
  d.f = RadialProfile::quadratic(0.0, 0.0, 0.25, 0.0, r_max);
  d.lambda_ode = 0.5;
  d.lambda_soliton = 1.0;
  return d;
}

std::vector<double> interior_grid(const WarpedSolitonData& data, std::size_t n) {
  const double lo = std::max({data.phi.r_lo(), data.h.r_lo(), data.f.r_lo()});
  const double hi = std::min({data.phi.r_hi(), data.h.r_hi(), data.f.r_hi()});
  if (!(hi > lo)) throw InvalidInput("profiles have no common domain");
  const double margin = 1e-3 * (hi - lo);
  return linspace(lo + margin, hi - margin, n);
}

} // namespace gflow::warped

#pragma once

// Cohomogeneity-one data dr^2 + phi(r)^2 g_{S^2} with H = h(r) dV and
// potential f(r). The sphere factor is the unit sphere, Ric(g_{S^2}) = g_{S^2}.
//
// Norm conventions: |H|^2 = H_{ijk}H^{ijk} and H^2_{ij} = H_{ipq}H_j^{pq},
// both without factorial normalisation, so H = h dV gives |H|^2 = 6h^2 and
// H^2 = 2h^2 g.
//
// Two soliton constants are carried. lambda_ode is the constant of the
// reduced ODE system; lambda_soliton is the constant of the tensor equations
//   2 Ric - H^2/2 = lambda g - L_X g,   Delta_d H = lambda H - L_X H,
// with X = grad f. Consistent data has lambda_soliton = 2 lambda_ode.

#include "gflow/warped/profile.hpp"

#include <array>
#include <span>
#include <string>
#include <vector>

namespace gflow::warped {

struct WarpedSolitonData {
  RadialProfile phi;
  RadialProfile h;
  RadialProfile f;
  double lambda_ode = 0.0;
  double lambda_soliton = 0.0;
};

struct ResidualReport {
  std::vector<double> grid;
  std::vector<double> r1, r2, r3;
  std::vector<double> tensor_metric_residual;
  std::vector<double> tensor_torsion_residual;
  double max_abs = 0.0;
};

/// Pointwise geometry in the orthonormal frame {e_r, e_sphere, e_sphere}.
struct PointGeometry {
  double ric_radial;
  double ric_sphere;
  double scalar_curvature;
  double hess_f_radial;
  double hess_f_sphere;
  double laplacian_f;
  double grad_f_sq;
  double h2_radial;   // H^2 eigenvalue on e_r
  double h2_sphere;   // H^2 eigenvalue on sphere directions
  double h_norm_sq;   // |H|^2
  double twisted_codiff_sq; // |d*H + i_{grad f}H|^2, raw 2-form contraction
};

PointGeometry point_geometry(const WarpedSolitonData& data, double r);

/// Warped Laplacian u'' + 2 (phi'/phi) u' of a radial function.
double radial_laplacian(double phi, double dphi, double du, double ddu);

/// H^2 eigenvalues and |H|^2 for H = h * (e1^e2^e3), obtained by contracting
/// the Levi-Civita symbol in an orthonormal frame.
struct TopFormContractions {
  std::array<double, 3> h2_eigenvalues;
  double norm_sq;
};
TopFormContractions top_form_contractions(double h);

ResidualReport ode_residuals(const WarpedSolitonData& data, std::span<const double> grid);
ResidualReport tensor_residuals(const WarpedSolitonData& data, std::span<const double> grid);

/// 2 - 2 phi'^2 - 4 phi phi'' - (lambda_ode + 3/2 h^2) phi^2, the combined
/// equation valid when h is constant; equals 2 R1 + R2 + R3 / h.
std::vector<double> combined_residual(const WarpedSolitonData& data,
                                      std::span<const double> grid);

/// phi^2 + phi'^2 + 2 phi phi'' - 1 on the grid.
std::vector<double> normalized_equation_residual(const RadialProfile& phi,
                                                 std::span<const double> grid);

struct ConventionReport {
  bool consistent = false;
  double ode_max = 0.0;
  double tensor_max = 0.0;
  double tolerance = 0.0;
  std::string message;
};

/// Checks that the ODE residuals vanish with lambda_ode and the tensor
/// residuals vanish with lambda_soliton simultaneously.
ConventionReport convention_check(const WarpedSolitonData& data, std::span<const double> grid,
                                  double tolerance = 1e-9);
/// Same, on 200 points spread across the interior of the common domain.
ConventionReport convention_check(const WarpedSolitonData& data, double tolerance = 1e-9);

struct Scaling {
  double a;
  double b;
};

/// Scaling (a, b) with a^2 b^2 = 1 and a^2 (lambda + 3/2 h^2) = 2, so that
/// phi(r) = a * psi(b r) turns the combined equation into
/// psi^2 + psi'^2 + 2 psi psi'' = 1.
Scaling normalize_phi(double lambda_ode, double h_const);

/// psi(r) = phi(r / b) / a.
RadialProfile normalized_profile(const RadialProfile& phi, Scaling s);
/// phi(r) = a * psi(b r).
RadialProfile denormalized_profile(const RadialProfile& psi, Scaling s);

/// lambda_ode = 1/2, phi = 1, h = 1, f = r^2/2 on S^2 x R.
WarpedSolitonData cylinder_soliton(double r_extent = 5.0);
/// lambda_ode = 1/2, phi = r, h = 0, f = r^2/4 on R^3 (interior r > 0).
WarpedSolitonData gaussian_shrinker(double r_max = 10.0);

/// n points strictly inside the intersection of the three profile domains.
std::vector<double> interior_grid(const WarpedSolitonData& data, std::size_t n);

} // namespace gflow::warped

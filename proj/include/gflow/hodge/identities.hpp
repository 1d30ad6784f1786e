#pragma once

// Grid checks of the form identities used by the soliton non-existence argument:
//   i_{grad f} H = *(df ^ *H)
//   d*H + i_{grad f} H = e^f d*(e^{-f} H), and d of it for closed H
//   int |d*H + i_{grad f} H|^2 e^{-f} = int <Delta_d H + L_{grad f} H, H> e^{-f}
//   (div H^2)_i = (1/6) d_i |H|^2 - (d*H)^{mn} H_{imn}
// The integral identity uses the increasing-index inner product; the
// divergence lemma uses raw full contractions.

#include "gflow/hodge/forms.hpp"

#include <cstdint>
#include <string>

namespace gflow::hodge {

/// Scalar potential with its exact gradient (coordinate partials).
struct Potential {
  std::function<double(std::span<const double>)> value;
  std::function<void(std::span<const double>, std::span<double>)> partials;
};

/// discrete: grad f from the stencil, so i_{grad f} H and *(df ^ *H) agree algebraically.
/// analytic: grad f from the exact partials; residuals then measure the stencil error.
enum class GradientMode { discrete, analytic };

struct TwistedCodiffResidual {
  double first = 0.0;  // d*H + i_X H - e^f d*(e^{-f} H)
  double second = 0.0; // Delta_d H + L_X H - d(e^f d*(e^{-f} H))
};

struct IntegralIdentity {
  double lhs = 0.0;
  double rhs = 0.0;
  double relative_gap = 0.0;
};

double check_suobing(const PeriodicGrid& g, const Potential& f, const Form& H,
                     GradientMode mode = GradientMode::analytic);

/// Throws InvalidInput when sup|dH| exceeds closed_tol max(1, sup|H|).
TwistedCodiffResidual check_twisted_codiff(const PeriodicGrid& g, const Potential& f,
                                           const Form& H,
                                           GradientMode mode = GradientMode::analytic,
                                           double closed_tol = 1e-9);

IntegralIdentity check_integral_identity(const PeriodicGrid& g, const Potential& f,
                                         const Form& H,
                                         GradientMode mode = GradientMode::analytic,
                                         double closed_tol = 1e-9);

double check_divH2(const PeriodicGrid& g, const Form& H);

/// |<d alpha, beta> - <alpha, d* beta>| in L2.
double adjointness_gap(const PeriodicGrid& g, const Form& alpha, const Form& beta);

/// log2(coarse / fine) for residuals on grids n and 2n.
double convergence_rate(double coarse, double fine);

/// f = amplitude * cos(x_axis) + shift.
Potential cosine_potential(int axis, double amplitude = 1.0, double shift = 0.0);
/// sin(x) dx^dy^dz: top degree on T^3, non-top on T^4.
Form sine_three_form(const PeriodicGrid& g);
/// Closed non-top 3-form on T^4 built as d of a trigonometric 2-form.
Form closed_t4_three_form(const PeriodicGrid& g);
/// Random trigonometric k-form with low wave numbers, deterministic in seed.
Form random_trig_form(const PeriodicGrid& g, int k, std::uint64_t seed);

} // namespace gflow::hodge

#include "gflow/warped/profile.hpp"

#include "gflow/error.hpp"

#include <algorithm>
#include <cmath>

namespace gflow::warped {

RadialProfile RadialProfile::closed_form(Fn value, Fn d1, Fn d2, double r_lo, double r_hi) {
  if (!value || !d1 || !d2) throw InvalidInput("closed-form profile needs value, d1 and d2");
  if (!(r_hi > r_lo)) throw InvalidInput("profile domain must be a non-empty interval");
  RadialProfile p;
  p.value_ = std::move(value);
  p.d1_ = std::move(d1);
  p.d2_ = std::move(d2);
  p.r_lo_ = r_lo;
  p.r_hi_ = r_hi;
  return p;
}

RadialProfile RadialProfile::constant(double c, double r_lo, double r_hi) {
  return closed_form([c](double) { return c; }, [](double) { return 0.0; },
                     [](double) { return 0.0; }, r_lo, r_hi);
}

RadialProfile RadialProfile::quadratic(double a, double b, double c, double r_lo, double r_hi) {
  return closed_form([=](double r) { return a + r * (b + c * r); },
                     [=](double r) { return b + 2.0 * c * r; }, [=](double) { return 2.0 * c; },
                     r_lo, r_hi);
}

RadialProfile RadialProfile::sampled(std::vector<double> r, std::vector<double> value,
                                     std::vector<double> d1, std::vector<double> d2) {
  const std::size_t n = r.size();
  if (n < 2) throw InvalidInput("sampled profile needs at least two nodes");
  if (value.size() != n || d1.size() != n || d2.size() != n)
    throw InvalidInput("sampled profile arrays differ in length");
  for (std::size_t i = 1; i < n; ++i)
    if (!(r[i] > r[i - 1])) throw InvalidInput("sampled profile nodes must increase strictly");
  RadialProfile p;
  p.r_lo_ = r.front();
  p.r_hi_ = r.back();
  p.nodes_ = std::move(r);
  p.v_ = std::move(value);
  p.dv_ = std::move(d1);
  p.ddv_ = std::move(d2);
  return p;
}

RadialProfile::Jet RadialProfile::jet(double r) const {
  if (!contains(r)) throw InvalidInput("radius outside the profile domain");
  if (!is_sampled()) {
    if (!value_) throw InvalidInput("profile is empty");
    return {value_(r), d1_(r), d2_(r)};
  }
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r);
  std::size_t k = it == nodes_.begin() ? 0 : static_cast<std::size_t>(it - nodes_.begin()) - 1;
  k = std::min(k, nodes_.size() - 2);
  const double h = nodes_[k + 1] - nodes_[k];
  const double t = (r - nodes_[k]) / h;
  const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;

  // Quintic Hermite basis and its first two t-derivatives.
  const double b0 = 1 - 10 * t3 + 15 * t4 - 6 * t5;
  const double b1 = t - 6 * t3 + 8 * t4 - 3 * t5;
  const double b2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5);
  const double b3 = 0.5 * (t3 - 2 * t4 + t5);
  const double b4 = -4 * t3 + 7 * t4 - 3 * t5;
  const double b5 = 10 * t3 - 15 * t4 + 6 * t5;

  const double db0 = -30 * t2 + 60 * t3 - 30 * t4;
  const double db1 = 1 - 18 * t2 + 32 * t3 - 15 * t4;
  const double db2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4);
  const double db3 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
  const double db4 = -12 * t2 + 28 * t3 - 15 * t4;
  const double db5 = 30 * t2 - 60 * t3 + 30 * t4;

  const double ddb0 = -60 * t + 180 * t2 - 120 * t3;
  const double ddb1 = -36 * t + 96 * t2 - 60 * t3;
  const double ddb2 = 0.5 * (2 - 18 * t + 36 * t2 - 20 * t3);
  const double ddb3 = 0.5 * (6 * t - 24 * t2 + 20 * t3);
  const double ddb4 = -24 * t + 84 * t2 - 60 * t3;
  const double ddb5 = 60 * t - 180 * t2 + 120 * t3;

  const double y0 = v_[k], y1 = v_[k + 1];
  const double m0 = h * dv_[k], m1 = h * dv_[k + 1];
  const double s0 = h * h * ddv_[k], s1 = h * h * ddv_[k + 1];

  Jet j{};
  j.value = y0 * b0 + m0 * b1 + s0 * b2 + s1 * b3 + m1 * b4 + y1 * b5;
  j.d1 = (y0 * db0 + m0 * db1 + s0 * db2 + s1 * db3 + m1 * db4 + y1 * db5) / h;
  j.d2 = (y0 * ddb0 + m0 * ddb1 + s0 * ddb2 + s1 * ddb3 + m1 * ddb4 + y1 * ddb5) / (h * h);
  return j;
}

double RadialProfile::consistency_error(std::span<const double> grid, double step) const {
  if (!(step > 0.0)) throw InvalidInput("finite-difference step must be positive");
  double worst = 0.0;
  for (double r : grid) {
    if (r - 2 * step < r_lo_ || r + 2 * step > r_hi_) continue;
    const double fm2 = value(r - 2 * step), fm1 = value(r - step), f0 = value(r);
    const double fp1 = value(r + step), fp2 = value(r + 2 * step);
    const double fd1 = (fm2 - 8 * fm1 + 8 * fp1 - fp2) / (12 * step);
    const double fd2 = (-fm2 + 16 * fm1 - 30 * f0 + 16 * fp1 - fp2) / (12 * step * step);
    const Jet j = jet(r);
    worst = std::max({worst, std::abs(fd1 - j.d1), std::abs(fd2 - j.d2)});
  }
  return worst;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  if (n == 0) return {};
  if (n == 1) return {lo};
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i)
    out[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  out.back() = hi;
  return out;
}

} // namespace gflow::warped

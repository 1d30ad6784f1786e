#pragma once

#include <functional>
#include <span>
#include <vector>

namespace gflow::warped {

/// A smooth real function of the radial coordinate with its first two
/// derivatives, either closed-form or sampled with quintic Hermite
/// interpolation through (value, d1, d2) nodes.
class RadialProfile {
public:
  using Fn = std::function<double(double)>;

  struct Jet {
    double value;
    double d1;
    double d2;
  };

  RadialProfile() = default;

  static RadialProfile closed_form(Fn value, Fn d1, Fn d2, double r_lo, double r_hi);
  static RadialProfile constant(double c, double r_lo, double r_hi);
  /// Quadratic a + b r + c r^2.
  static RadialProfile quadratic(double a, double b, double c, double r_lo, double r_hi);
  /// Nodes must be strictly increasing, at least two of them.
  static RadialProfile sampled(std::vector<double> r, std::vector<double> value,
                               std::vector<double> d1, std::vector<double> d2);

  Jet jet(double r) const;
  double value(double r) const { return jet(r).value; }
  double d1(double r) const { return jet(r).d1; }
  double d2(double r) const { return jet(r).d2; }

  double r_lo() const { return r_lo_; }
  double r_hi() const { return r_hi_; }
  bool contains(double r) const { return r >= r_lo_ && r <= r_hi_; }
  bool is_sampled() const { return !nodes_.empty(); }

  /// Largest gap between (d1, d2) and fourth-order central differences of
  /// value() with the given step, over grid points at least 2*step inside
  /// the domain.
  double consistency_error(std::span<const double> grid, double step) const;

private:
  Fn value_, d1_, d2_;
  std::vector<double> nodes_, v_, dv_, ddv_;
  double r_lo_ = 0.0;
  double r_hi_ = 0.0;
};

/// n evenly spaced points on [lo, hi], endpoints included.
std::vector<double> linspace(double lo, double hi, std::size_t n);

} // namespace gflow::warped

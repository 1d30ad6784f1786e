#pragma once

// Differential forms on a flat periodic grid with a constant diagonal metric.
// A k-form stores one scalar field per strictly increasing multi-index, in
// lexicographic order; derivatives use the fourth-order central stencil.

#include <array>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gflow::hodge {

using Field = std::vector<double>;

class PeriodicGrid {
public:
  /// Throws InvalidInput unless dim is 3 or 4, every size >= 16, and periods
  /// and metric coefficients are positive. Empty periods/metric mean 2 pi / 1.
  PeriodicGrid(int dim, std::vector<std::size_t> sizes, std::vector<double> periods = {},
               std::vector<double> metric = {});
  static PeriodicGrid cube(int dim, std::size_t n);

  int dim() const { return dim_; }
  std::size_t size(int axis) const { return sizes_[static_cast<std::size_t>(axis)]; }
  double period(int axis) const { return periods_[static_cast<std::size_t>(axis)]; }
  double spacing(int axis) const { return spacing_[static_cast<std::size_t>(axis)]; }
  /// Diagonal coefficient g_aa.
  double metric(int axis) const { return metric_[static_cast<std::size_t>(axis)]; }
  double sqrt_det() const { return sqrt_det_; }
  std::size_t points() const { return points_; }
  /// Row-major with the last axis fastest.
  std::size_t stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

  /// Coordinates of a flat point index.
  void coordinates(std::size_t index, std::span<double> x) const;

  /// Samples fn on every grid point.
  Field sample(const std::function<double(std::span<const double>)>& fn) const;

  /// Fourth-order central difference along one axis.
  Field partial(const Field& u, int axis) const;

  /// Trapezoid rule over the torus, including sqrt(det g); fixed summation order.
  double integrate(const Field& u) const;

private:
  int dim_;
  std::vector<std::size_t> sizes_;
  std::vector<double> periods_;
  std::vector<double> metric_;
  std::vector<double> spacing_;
  std::vector<std::size_t> strides_;
  std::size_t points_ = 0;
  double sqrt_det_ = 1.0;
};

/// Strictly increasing multi-indices of length k in {0..n-1}, lexicographic.
const std::vector<std::vector<int>>& multi_indices(int n, int k);

struct Form {
  int degree = 0;
  std::vector<Field> comps;

  /// Zero k-form on the grid.
  static Form zero(const PeriodicGrid& g, int k);
  /// 0-form holding a scalar field.
  static Form scalar(Field u);
  /// k-form from one function per multi-index in multi_indices order.
  static Form sample(const PeriodicGrid& g, int k,
                     const std::vector<std::function<double(std::span<const double>)>>& fns);

  Field& at(std::span<const int> idx, int n);
  const Field& at(std::span<const int> idx, int n) const;
};

/// Vector field given by its coordinate components X^a.
using VectorField = std::vector<Field>;

Form d(const PeriodicGrid& g, const Form& w);
Form hodge(const PeriodicGrid& g, const Form& w);
/// d* = (-1)^{n(k+1)+1} * d * on k-forms.
Form codiff(const PeriodicGrid& g, const Form& w);
Form interior(const PeriodicGrid& g, const VectorField& x, const Form& w);
/// Cartan: L_X = d i_X + i_X d.
Form lie(const PeriodicGrid& g, const VectorField& x, const Form& w);
Form wedge(const PeriodicGrid& g, const Form& a, const Form& b);

Form add(const Form& a, const Form& b);
Form subtract(const Form& a, const Form& b);
Form scale(const Form& a, double c);
/// Pointwise product with a scalar field.
Form multiply(const Field& s, const Form& a);

/// Pointwise inner product sum_I a_I b_I prod_{i in I} g^{ii} (increasing
/// indices, no factorial).
Field pointwise_inner(const PeriodicGrid& g, const Form& a, const Form& b);
/// L2 inner product with an optional weight field.
double l2_inner(const PeriodicGrid& g, const Form& a, const Form& b, const Field* weight = nullptr);

/// Gradient X^a = g^{aa} d_a u by the discrete stencil.
VectorField gradient(const PeriodicGrid& g, const Field& u);

double sup_norm(const Form& a);
double sup_norm(const Field& u);

/// Fully antisymmetric component w_{i1..ik} for arbitrary (possibly unsorted or
/// repeated) indices; returns the field pointer and a sign in {-1, 0, 1}.
std::pair<const Field*, int> component(const Form& w, int n, std::span<const int> idx);

} // namespace gflow::hodge

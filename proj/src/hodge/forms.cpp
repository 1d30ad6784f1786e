#include "gflow/hodge/forms.hpp"

#include "gflow/error.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

namespace gflow::hodge {

namespace {

using Mask = unsigned;

Mask mask_of(std::span<const int> idx) {
  Mask m = 0;
  for (int i : idx) m |= 1u << i;
  return m;
}

// (-1)^{#{j in m : j < a}}: the sign of dx^a ^ dx^m against dx^{m + a}.
int insert_sign(int a, Mask m) { return std::popcount(m & ((1u << a) - 1u)) % 2 ? -1 : 1; }

// Sign of the shuffle taking (I, J) to sorted order, both sorted.
int shuffle_sign(Mask I, Mask J) {
  int inversions = 0;
  for (int i = 0; i < 32; ++i)
    if (I & (1u << i)) inversions += std::popcount(J & ((1u << i) - 1u));
  return inversions % 2 ? -1 : 1;
}

struct Table {
  std::vector<std::vector<int>> indices;
  std::vector<Mask> masks;
  std::array<int, 16> position{};
};

const Table& table(int n, int k) {
  static const auto all = [] {
    std::array<std::array<Table, 5>, 5> t{};
    for (int n = 0; n <= 4; ++n) {
      for (int k = 0; k <= n; ++k) {
        auto& tab = t[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
        tab.position.fill(-1);
        std::vector<int> cur;
        // Lexicographic enumeration of k-subsets of {0..n-1}.
        std::function<void(int)> rec = [&](int start) {
          if (static_cast<int>(cur.size()) == k) {
            tab.position[mask_of(cur)] = static_cast<int>(tab.indices.size());
            tab.indices.push_back(cur);
            tab.masks.push_back(mask_of(cur));
            return;
          }
          for (int i = start; i < n; ++i) {
            cur.push_back(i);
            rec(i + 1);
            cur.pop_back();
          }
        };
        rec(0);
      }
    }
    return t;
  }();
  if (n < 0 || n > 4 || k < 0 || k > n) throw InvalidInput("form degree out of range");
  return all[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

void require_form(const PeriodicGrid& g, const Form& w) {
  if (w.degree < 0 || w.degree > g.dim()) throw InvalidInput("form degree out of range");
  if (w.comps.size() != table(g.dim(), w.degree).indices.size())
    throw InvalidInput("form has the wrong number of components");
  for (const auto& c : w.comps)
    if (c.size() != g.points()) throw InvalidInput("form component does not match the grid");
}

void axpy(Field& y, double a, const Field& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += a * x[i];
}

} // namespace

PeriodicGrid::PeriodicGrid(int dim, std::vector<std::size_t> sizes, std::vector<double> periods,
                           std::vector<double> metric)
    : dim_(dim), sizes_(std::move(sizes)), periods_(std::move(periods)),
      metric_(std::move(metric)) {
  if (dim != 3 && dim != 4) throw InvalidInput("grid dimension must be 3 or 4");
  const auto n = static_cast<std::size_t>(dim);
  if (sizes_.size() != n) throw InvalidInput("one size per axis required");
  if (periods_.empty()) periods_.assign(n, 2.0 * std::numbers::pi);
  if (metric_.empty()) metric_.assign(n, 1.0);
  if (periods_.size() != n || metric_.size() != n)
    throw InvalidInput("periods and metric need one entry per axis");
  points_ = 1;
  for (std::size_t a = 0; a < n; ++a) {
    if (sizes_[a] < 16) throw InvalidInput("grid sizes must be at least 16");
    if (!(periods_[a] > 0.0)) throw InvalidInput("periods must be positive");
    if (!(metric_[a] > 0.0)) throw InvalidInput("metric coefficients must be positive");
    spacing_.push_back(periods_[a] / static_cast<double>(sizes_[a]));
    points_ *= sizes_[a];
    sqrt_det_ *= std::sqrt(metric_[a]);
  }
  strides_.assign(n, 1);
  for (std::size_t a = n - 1; a > 0; --a) strides_[a - 1] = strides_[a] * sizes_[a];
}

PeriodicGrid PeriodicGrid::cube(int dim, std::size_t n) {
  return PeriodicGrid(dim, std::vector<std::size_t>(static_cast<std::size_t>(dim), n));
}

void PeriodicGrid::coordinates(std::size_t index, std::span<double> x) const {
  for (int a = 0; a < dim_; ++a) {
    const auto ua = static_cast<std::size_t>(a);
    x[ua] = static_cast<double>((index / strides_[ua]) % sizes_[ua]) * spacing_[ua];
  }
}

Field PeriodicGrid::sample(const std::function<double(std::span<const double>)>& fn) const {
  Field out(points_);
  std::array<double, 4> x{};
  for (std::size_t i = 0; i < points_; ++i) {
    coordinates(i, std::span(x.data(), static_cast<std::size_t>(dim_)));
    out[i] = fn(std::span<const double>(x.data(), static_cast<std::size_t>(dim_)));
  }
  return out;
}

Field PeriodicGrid::partial(const Field& u, int axis) const {
  if (u.size() != points_) throw InvalidInput("field does not match the grid");
  const auto ua = static_cast<std::size_t>(axis);
  const std::size_t n = sizes_[ua], s = strides_[ua], block = n * s;
  const double inv = 1.0 / (12.0 * spacing_[ua]);
  Field out(points_);
  for (std::size_t base = 0; base < points_; base += block) {
    for (std::size_t i = 0; i < n; ++i) {
      const double* p1 = &u[base + ((i + 1) % n) * s];
      const double* p2 = &u[base + ((i + 2) % n) * s];
      const double* m1 = &u[base + ((i + n - 1) % n) * s];
      const double* m2 = &u[base + ((i + n - 2) % n) * s];
      double* o = &out[base + i * s];
      for (std::size_t j = 0; j < s; ++j) o[j] = (-p2[j] + 8.0 * p1[j] - 8.0 * m1[j] + m2[j]) * inv;
    }
  }
  return out;
}

double PeriodicGrid::integrate(const Field& u) const {
  if (u.size() != points_) throw InvalidInput("field does not match the grid");
  double cell = sqrt_det_;
  for (double h : spacing_) cell *= h;
  // Pairwise blocks keep the sum deterministic and accurate.
  double total = 0.0;
  const std::size_t chunk = 4096;
  for (std::size_t b = 0; b < points_; b += chunk) {
    double part = 0.0;
    const std::size_t e = std::min(points_, b + chunk);
    for (std::size_t i = b; i < e; ++i) part += u[i];
    total += part;
  }
  return total * cell;
}

const std::vector<std::vector<int>>& multi_indices(int n, int k) { return table(n, k).indices; }

Form Form::zero(const PeriodicGrid& g, int k) {
  Form w;
  w.degree = k;
  w.comps.assign(table(g.dim(), k).indices.size(), Field(g.points(), 0.0));
  return w;
}

Form Form::scalar(Field u) {
  Form w;
  w.degree = 0;
  w.comps.push_back(std::move(u));
  return w;
}

Form Form::sample(const PeriodicGrid& g, int k,
                  const std::vector<std::function<double(std::span<const double>)>>& fns) {
  const auto& idx = table(g.dim(), k).indices;
  if (fns.size() != idx.size()) throw InvalidInput("one function per multi-index required");
  Form w;
  w.degree = k;
  for (const auto& fn : fns) w.comps.push_back(g.sample(fn));
  return w;
}

Field& Form::at(std::span<const int> idx, int n) {
  return const_cast<Field&>(static_cast<const Form&>(*this).at(idx, n));
}

const Field& Form::at(std::span<const int> idx, int n) const {
  const int p = table(n, degree).position[mask_of(idx)];
  if (p < 0 || static_cast<int>(idx.size()) != degree) throw InvalidInput("bad multi-index");
  return comps[static_cast<std::size_t>(p)];
}

std::pair<const Field*, int> component(const Form& w, int n, std::span<const int> idx) {
  std::array<int, 4> s{};
  std::copy(idx.begin(), idx.end(), s.begin());
  const std::size_t k = idx.size();
  int sign = 1;
  // Insertion sort tracking parity.
  for (std::size_t i = 1; i < k; ++i)
    for (std::size_t j = i; j > 0 && s[j - 1] > s[j]; --j) {
      std::swap(s[j - 1], s[j]);
      sign = -sign;
    }
  for (std::size_t i = 1; i < k; ++i)
    if (s[i] == s[i - 1]) return {nullptr, 0};
  return {&w.at(std::span<const int>(s.data(), k), n), sign};
}

Form d(const PeriodicGrid& g, const Form& w) {
  require_form(g, w);
  const int n = g.dim(), k = w.degree;
  if (k == n) throw InvalidInput("d of a top-degree form has no target degree");
  const auto& src = table(n, k);
  Form out = Form::zero(g, k + 1);
  const auto& dst = table(n, k + 1);
  for (std::size_t c = 0; c < src.masks.size(); ++c) {
    for (int a = 0; a < n; ++a) {
      if (src.masks[c] & (1u << a)) continue;
      const Mask m = src.masks[c] | (1u << a);
      const auto pos = static_cast<std::size_t>(dst.position[m]);
      axpy(out.comps[pos], insert_sign(a, src.masks[c]), g.partial(w.comps[c], a));
    }
  }
  return out;
}

Form hodge(const PeriodicGrid& g, const Form& w) {
  require_form(g, w);
  const int n = g.dim(), k = w.degree;
  const auto& src = table(n, k);
  const auto& dst = table(n, n - k);
  const Mask full = (1u << n) - 1u;
  Form out = Form::zero(g, n - k);
  for (std::size_t c = 0; c < src.masks.size(); ++c) {
    const Mask I = src.masks[c], J = full & ~I;
    double factor = g.sqrt_det() * shuffle_sign(I, J);
    for (int a = 0; a < n; ++a)
      if (I & (1u << a)) factor /= g.metric(a);
    auto& o = out.comps[static_cast<std::size_t>(dst.position[J])];
    const auto& src_field = w.comps[c];
    for (std::size_t i = 0; i < o.size(); ++i) o[i] = factor * src_field[i];
  }
  return out;
}

Form codiff(const PeriodicGrid& g, const Form& w) {
  require_form(g, w);
  const int n = g.dim(), k = w.degree;
  if (k == 0) throw InvalidInput("codifferential of a 0-form is zero by convention; not defined here");
  const int e = n * (k + 1) + 1;
  return scale(hodge(g, d(g, hodge(g, w))), e % 2 ? -1.0 : 1.0);
}

Form interior(const PeriodicGrid& g, const VectorField& x, const Form& w) {
  require_form(g, w);
  const int n = g.dim(), k = w.degree;
  if (k == 0) throw InvalidInput("interior product needs degree >= 1");
  if (x.size() != static_cast<std::size_t>(n)) throw InvalidInput("vector field dimension mismatch");
  const auto& src = table(n, k);
  const auto& dst = table(n, k - 1);
  Form out = Form::zero(g, k - 1);
  for (std::size_t c = 0; c < dst.masks.size(); ++c) {
    auto& o = out.comps[c];
    for (int a = 0; a < n; ++a) {
      if (dst.masks[c] & (1u << a)) continue;
      const auto pos = static_cast<std::size_t>(src.position[dst.masks[c] | (1u << a)]);
      const double sgn = insert_sign(a, dst.masks[c]);
      const auto& xa = x[static_cast<std::size_t>(a)];
      const auto& wf = w.comps[pos];
      for (std::size_t i = 0; i < o.size(); ++i) o[i] += sgn * xa[i] * wf[i];
    }
  }
  return out;
}

Form lie(const PeriodicGrid& g, const VectorField& x, const Form& w) {
  if (w.degree == 0) return interior(g, x, d(g, w));
  if (w.degree == g.dim()) return d(g, interior(g, x, w));
  return add(d(g, interior(g, x, w)), interior(g, x, d(g, w)));
}

Form wedge(const PeriodicGrid& g, const Form& a, const Form& b) {
  require_form(g, a);
  require_form(g, b);
  const int n = g.dim(), p = a.degree, q = b.degree;
  if (p + q > n) throw InvalidInput("wedge degree exceeds the dimension");
  const auto& ta = table(n, p);
  const auto& tb = table(n, q);
  const auto& tc = table(n, p + q);
  Form out = Form::zero(g, p + q);
  for (std::size_t i = 0; i < ta.masks.size(); ++i)
    for (std::size_t j = 0; j < tb.masks.size(); ++j) {
      if (ta.masks[i] & tb.masks[j]) continue;
      const double sgn = shuffle_sign(ta.masks[i], tb.masks[j]);
      auto& o = out.comps[static_cast<std::size_t>(tc.position[ta.masks[i] | tb.masks[j]])];
      const auto& fa = a.comps[i];
      const auto& fb = b.comps[j];
      for (std::size_t s = 0; s < o.size(); ++s) o[s] += sgn * fa[s] * fb[s];
    }
  return out;
}

Form add(const Form& a, const Form& b) {
  if (a.degree != b.degree || a.comps.size() != b.comps.size())
    throw InvalidInput("degree mismatch in form sum");
  Form out = a;
  for (std::size_t c = 0; c < out.comps.size(); ++c) axpy(out.comps[c], 1.0, b.comps[c]);
  return out;
}

Form subtract(const Form& a, const Form& b) {
  if (a.degree != b.degree || a.comps.size() != b.comps.size())
    throw InvalidInput("degree mismatch in form difference");
  Form out = a;
  for (std::size_t c = 0; c < out.comps.size(); ++c) axpy(out.comps[c], -1.0, b.comps[c]);
  return out;
}

Form scale(const Form& a, double c) {
  Form out = a;
  for (auto& f : out.comps)
    for (double& v : f) v *= c;
  return out;
}

Form multiply(const Field& s, const Form& a) {
  Form out = a;
  for (auto& f : out.comps) {
    if (f.size() != s.size()) throw InvalidInput("scalar field does not match the form");
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= s[i];
  }
  return out;
}

Field pointwise_inner(const PeriodicGrid& g, const Form& a, const Form& b) {
  require_form(g, a);
  require_form(g, b);
  if (a.degree != b.degree) throw InvalidInput("degree mismatch in inner product");
  const auto& t = table(g.dim(), a.degree);
  Field out(g.points(), 0.0);
  for (std::size_t c = 0; c < t.masks.size(); ++c) {
    double w = 1.0;
    for (int ax = 0; ax < g.dim(); ++ax)
      if (t.masks[c] & (1u << ax)) w /= g.metric(ax);
    const auto& fa = a.comps[c];
    const auto& fb = b.comps[c];
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += w * fa[i] * fb[i];
  }
  return out;
}

double l2_inner(const PeriodicGrid& g, const Form& a, const Form& b, const Field* weight) {
  Field p = pointwise_inner(g, a, b);
  if (weight) {
    if (weight->size() != p.size()) throw InvalidInput("weight does not match the grid");
    for (std::size_t i = 0; i < p.size(); ++i) p[i] *= (*weight)[i];
  }
  return g.integrate(p);
}

VectorField gradient(const PeriodicGrid& g, const Field& u) {
  VectorField x;
  for (int a = 0; a < g.dim(); ++a) {
    Field da = g.partial(u, a);
    const double inv = 1.0 / g.metric(a);
    for (double& v : da) v *= inv;
    x.push_back(std::move(da));
  }
  return x;
}

double sup_norm(const Field& u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::abs(v));
  return m;
}

double sup_norm(const Form& a) {
  double m = 0.0;
  for (const auto& f : a.comps) m = std::max(m, sup_norm(f));
  return m;
}

} // namespace gflow::hodge

#include "gflow/ode/integrator.hpp"

#include "gflow/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gflow::ode {

namespace {

// Dormand-Prince 5(4) tableau and Hairer's dense-output coefficients.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

bool all_finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

double max_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

bool crosses(double before, double after, Direction dir) {
  const bool rising = before < 0.0 && after >= 0.0;
  const bool falling = before > 0.0 && after <= 0.0;
  switch (dir) {
    case Direction::rising: return rising;
    case Direction::falling: return falling;
    case Direction::any: return rising || falling;
  }
  return false;
}

struct Workspace {
  explicit Workspace(std::size_t n)
      : k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n), err(n) {}
  State k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, err;
};

// One trial step from (t, y) with k1 = f(t, y) already in ws.k1.
// Returns the scaled max-norm error estimate, or +inf if a stage left the
// admissible domain.
double trial_step(const Rhs& f, double t, const State& y, double h, double rtol, double atol,
                  Workspace& ws) {
  const std::size_t n = y.size();
  auto stage = [&](State& out, double tc) {
    f(tc, ws.ytmp, out);
    return all_finite(out);
  };
  for (std::size_t i = 0; i < n; ++i) ws.ytmp[i] = y[i] + h * a21 * ws.k1[i];
  if (!stage(ws.k2, t + c2 * h)) return std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) ws.ytmp[i] = y[i] + h * (a31 * ws.k1[i] + a32 * ws.k2[i]);
  if (!stage(ws.k3, t + c3 * h)) return std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    ws.ytmp[i] = y[i] + h * (a41 * ws.k1[i] + a42 * ws.k2[i] + a43 * ws.k3[i]);
  if (!stage(ws.k4, t + c4 * h)) return std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    ws.ytmp[i] = y[i] + h * (a51 * ws.k1[i] + a52 * ws.k2[i] + a53 * ws.k3[i] + a54 * ws.k4[i]);
  if (!stage(ws.k5, t + c5 * h)) return std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    ws.ytmp[i] = y[i] + h * (a61 * ws.k1[i] + a62 * ws.k2[i] + a63 * ws.k3[i] +
                             a64 * ws.k4[i] + a65 * ws.k5[i]);
  if (!stage(ws.k6, t + h)) return std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    ws.ynew[i] = y[i] + h * (a71 * ws.k1[i] + a73 * ws.k3[i] + a74 * ws.k4[i] +
                             a75 * ws.k5[i] + a76 * ws.k6[i]);
  f(t + h, ws.ynew, ws.k7);
  if (!all_finite(ws.k7) || !all_finite(ws.ynew)) return std::numeric_limits<double>::infinity();

  double err = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ws.err[i] = h * (e1 * ws.k1[i] + e3 * ws.k3[i] + e4 * ws.k4[i] + e5 * ws.k5[i] +
                     e6 * ws.k6[i] + e7 * ws.k7[i]);
    const double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(ws.ynew[i]));
    err = std::max(err, std::abs(ws.err[i]) / scale);
  }
  return err;
}

double initial_step(const Rhs& f, double t0, const State& y0, const State& f0, double rtol,
                    double atol, double hmax) {
  const std::size_t n = y0.size();
  double dnf = 0.0, dny = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = atol + rtol * std::abs(y0[i]);
    dnf = std::max(dnf, std::abs(f0[i]) / sk);
    dny = std::max(dny, std::abs(y0[i]) / sk);
  }
  double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
  h = std::min(h, hmax);
  State y1(n), f1(n);
  for (std::size_t i = 0; i < n; ++i) y1[i] = y0[i] + h * f0[i];
  f(t0 + h, y1, f1);
  if (!all_finite(f1)) return std::min(h * 1e-3, hmax);
  double der2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double sk = atol + rtol * std::abs(y0[i]);
    der2 = std::max(der2, std::abs(f1[i] - f0[i]) / sk);
  }
  der2 /= h;
  const double der12 = std::max(der2, dnf);
  const double h1 =
      der12 <= 1e-15 ? std::max(1e-6, h * 1e-3) : std::pow(0.01 / der12, 1.0 / 5.0);
  return std::min({100.0 * h, h1, hmax});
}

} // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::reached_tmax: return "reached_tmax";
    case Termination::event: return "event";
    case Termination::blowup: return "blowup";
    case Termination::step_underflow: return "step_underflow";
  }
  return "unknown";
}

std::size_t Trajectory::segment_for(double t) const {
  if (times_.size() < 2) return 0;
  auto it = std::upper_bound(times_.begin(), times_.end(), t);
  std::size_t idx = it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
  return std::min(idx, times_.size() - 2);
}

double Trajectory::interpolate(std::size_t seg, double t, std::size_t i) const {
  const double* r = dense_.data() + seg * 5 * dim_;
  const double theta = (t - times_[seg]) / steps_[seg];
  const double theta1 = 1.0 - theta;
  return r[i] + theta * (r[dim_ + i] +
                         theta1 * (r[2 * dim_ + i] +
                                   theta * (r[3 * dim_ + i] + theta1 * r[4 * dim_ + i])));
}

State Trajectory::at(double t) const {
  if (times_.empty()) throw InvalidInput("empty trajectory");
  if (t < times_.front() || t > times_.back())
    throw InvalidInput("dense output requested outside the integrated interval");
  if (times_.size() == 1) return states_.front();
  const std::size_t seg = segment_for(t);
  if (t == times_[seg]) return states_[seg];
  if (t == times_[seg + 1]) return states_[seg + 1];
  State y(dim_);
  for (std::size_t i = 0; i < dim_; ++i) y[i] = interpolate(seg, t, i);
  return y;
}

double Trajectory::component_at(double t, std::size_t i) const {
  if (i >= dim_) throw InvalidInput("component index out of range");
  if (t < times_.front() || t > times_.back())
    throw InvalidInput("dense output requested outside the integrated interval");
  if (times_.size() == 1) return states_.front()[i];
  const std::size_t seg = segment_for(t);
  if (t == times_[seg + 1]) return states_[seg + 1][i];
  return interpolate(seg, t, i);
}

const EventRecord* Trajectory::first_event(std::size_t event_id) const {
  for (const auto& e : events_)
    if (e.event_id == event_id) return &e;
  return nullptr;
}

Trajectory integrate(const OdeProblem& problem, std::span<const EventSpec> events,
                     const IntegratorOptions& options) {
  const std::size_t n = problem.dimension;
  if (n == 0) throw InvalidInput("ODE dimension must be positive");
  if (problem.state0.size() != n) throw InvalidInput("initial state has wrong dimension");
  if (!problem.rhs) throw InvalidInput("ODE right-hand side is empty");
  if (!(problem.tmax > problem.t0)) throw InvalidInput("tmax must exceed t0");
  if (!(options.rtol > 0.0) || !(options.atol > 0.0))
    throw InvalidInput("rtol and atol must be positive");
  if (!all_finite(problem.state0)) throw InvalidInput("initial state is not finite");
  for (const auto& ev : events)
    if (!ev.indicator) throw InvalidInput("event indicator is empty");

  const Rhs& f = problem.rhs;
  const double timescale = problem.tmax - problem.t0;
  const double hmin = options.step_floor * timescale;
  const double hmax = options.max_step > 0.0 ? options.max_step : timescale;
  const double root_tol = options.event_tolerance * timescale;

  Trajectory traj;
  traj.dim_ = n;
  traj.times_.push_back(problem.t0);
  traj.states_.push_back(problem.state0);

  Workspace ws(n);
  double t = problem.t0;
  State y = problem.state0;
  f(t, y, ws.k1);
  if (!all_finite(ws.k1)) throw InvalidInput("right-hand side is not finite at the initial state");

  std::vector<double> g_prev(events.size());
  for (std::size_t e = 0; e < events.size(); ++e) g_prev[e] = events[e].indicator(t, y);

  double h = options.initial_step > 0.0
                 ? std::min(options.initial_step, hmax)
                 : initial_step(f, t, y, ws.k1, options.rtol, options.atol, hmax);
  bool last_rejected = false;
  State dense(5 * n);
  State y_event(n);

  while (true) {
    if (t + h >= problem.tmax) h = problem.tmax - t;
    if (h < hmin && problem.tmax - t > hmin) {
      traj.termination_ = Termination::step_underflow;
      return traj;
    }

    const double err = trial_step(f, t, y, h, options.rtol, options.atol, ws);
    if (!(err <= 1.0)) {
      const double fac = std::isfinite(err) ? std::max(0.2, 0.9 * std::pow(err, -0.2)) : 0.25;
      h *= fac;
      last_rejected = true;
      continue;
    }

    // Accepted: build the dense-output polynomial for [t, t+h].
    for (std::size_t i = 0; i < n; ++i) {
      const double ydiff = ws.ynew[i] - y[i];
      const double bspl = h * ws.k1[i] - ydiff;
      dense[i] = y[i];
      dense[n + i] = ydiff;
      dense[2 * n + i] = bspl;
      dense[3 * n + i] = ydiff - h * ws.k7[i] - bspl;
      dense[4 * n + i] = h * (d1 * ws.k1[i] + d3 * ws.k3[i] + d4 * ws.k4[i] + d5 * ws.k5[i] +
                              d6 * ws.k6[i] + d7 * ws.k7[i]);
    }
    traj.dense_.insert(traj.dense_.end(), dense.begin(), dense.end());
    traj.steps_.push_back(h);
    const double t_new = (t + h >= problem.tmax) ? problem.tmax : t + h;
    const std::size_t seg = traj.steps_.size() - 1;

    auto dense_at = [&](double tq, State& out) {
      const double theta = (tq - t) / h;
      const double theta1 = 1.0 - theta;
      for (std::size_t i = 0; i < n; ++i)
        out[i] = dense[i] + theta * (dense[n + i] +
                                     theta1 * (dense[2 * n + i] +
                                               theta * (dense[3 * n + i] +
                                                        theta1 * dense[4 * n + i])));
    };

    // Event detection on the accepted step.
    struct Hit {
      double time;
      std::size_t id;
    };
    std::vector<Hit> hits;
    std::vector<double> g_new(events.size());
    for (std::size_t e = 0; e < events.size(); ++e) {
      g_new[e] = events[e].indicator(t_new, ws.ynew);
      if (!crosses(g_prev[e], g_new[e], events[e].direction)) continue;
      // Illinois-modified regula falsi on the dense interpolant.
      double ta = t, tb = t_new, ga = g_prev[e], gb = g_new[e];
      int side = 0;
      double tc = tb;
      for (int it = 0; it < 200 && tb - ta > root_tol; ++it) {
        tc = (gb - ga) != 0.0 ? tb - gb * (tb - ta) / (gb - ga) : 0.5 * (ta + tb);
        if (!(tc > ta && tc < tb)) tc = 0.5 * (ta + tb);
        dense_at(tc, y_event);
        const double gc = events[e].indicator(tc, y_event);
        if (gc == 0.0) {
          ta = tb = tc;
          break;
        }
        if ((gc > 0.0) == (gb > 0.0)) {
          tb = tc;
          gb = gc;
          if (side == -1) ga *= 0.5;
          side = -1;
        } else {
          ta = tc;
          ga = gc;
          if (side == 1) gb *= 0.5;
          side = 1;
        }
      }
      hits.push_back({tb, e});
    }
    std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) {
      return a.time < b.time || (a.time == b.time && a.id < b.id);
    });

    bool stop = false;
    for (const Hit& hit : hits) {
      State ye(n);
      if (hit.time >= t_new) {
        ye = ws.ynew;
      } else {
        dense_at(hit.time, ye);
      }
      traj.events_.push_back({hit.time, ye, hit.id});
      if (events[hit.id].terminal) {
        if (hit.time > t) {
          traj.times_.push_back(hit.time);
          traj.states_.push_back(ye);
        } else {
          // Root coincides with the step start: drop the dense segment.
          traj.dense_.resize(traj.dense_.size() - 5 * n);
          traj.steps_.pop_back();
        }
        traj.termination_ = Termination::event;
        stop = true;
        break;
      }
    }
    if (stop) {
      (void)seg;
      return traj;
    }

    t = t_new;
    y = ws.ynew;
    std::swap(ws.k1, ws.k7); // FSAL
    g_prev = g_new;
    traj.times_.push_back(t);
    traj.states_.push_back(y);

    if (max_abs(y) > options.blowup_ceiling) {
      traj.termination_ = Termination::blowup;
      return traj;
    }
    if (t >= problem.tmax) {
      traj.termination_ = Termination::reached_tmax;
      return traj;
    }

    double fac = err > 0.0 ? 0.9 * std::pow(err, -0.2) : 10.0;
    fac = std::clamp(fac, 0.2, 10.0);
    if (last_rejected) fac = std::min(fac, 1.0);
    last_rejected = false;
    h = std::min(h * fac, hmax);
  }
}

OdeProblem time_reversed(const Rhs& rhs, double t_start, State state_start, double t_stop) {
  OdeProblem p;
  p.dimension = state_start.size();
  p.rhs = [rhs](double s, std::span<const double> y, std::span<double> dydt) {
    rhs(-s, y, dydt);
    for (double& v : dydt) v = -v;
  };
  p.t0 = -t_start;
  p.state0 = std::move(state_start);
  p.tmax = -t_stop;
  return p;
}

} // namespace gflow::ode

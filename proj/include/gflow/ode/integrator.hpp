#pragma once

// Adaptive Dormand-Prince 5(4) integration with dense output and event location.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gflow::ode {

using State = std::vector<double>;

/// Right-hand side dy/dt = rhs(t, y), written into `dydt`. Non-finite output
/// is treated as leaving the admissible domain and forces a smaller step.
using Rhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

using Indicator = std::function<double(double t, std::span<const double> y)>;

struct OdeProblem {
  std::size_t dimension = 0;
  Rhs rhs;
  double t0 = 0.0;
  State state0;
  double tmax = 0.0;
};

enum class Direction { rising, falling, any };

struct EventSpec {
  Indicator indicator;
  Direction direction = Direction::any;
  bool terminal = false;
  std::string name;
};

enum class Termination { reached_tmax, event, blowup, step_underflow };

std::string to_string(Termination t);

struct EventRecord {
  double time = 0.0;
  State state;
  std::size_t event_id = 0;
};

struct IntegratorOptions {
  double rtol = 1e-10;
  double atol = 1e-12;
  /// Run stops with Termination::blowup once max|y_i| exceeds this.
  double blowup_ceiling = 1e12;
  /// Step floor, relative to |tmax - t0|.
  double step_floor = 1e-14;
  /// Event root tolerance, relative to |tmax - t0|.
  double event_tolerance = 1e-12;
  /// Zero selects the automatic starting step.
  double initial_step = 0.0;
  /// Largest allowed step; zero means |tmax - t0|.
  double max_step = 0.0;
};

/// Accepted steps of one integration run plus the per-step dense output.
class Trajectory {
public:
  const std::vector<double>& times() const { return times_; }
  const std::vector<State>& states() const { return states_; }
  const std::vector<EventRecord>& events() const { return events_; }
  Termination termination() const { return termination_; }
  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return times_.size(); }

  double t_begin() const { return times_.front(); }
  double t_end() const { return times_.back(); }

  /// Dense-output state at any t in [t_begin, t_end].
  State at(double t) const;
  double component_at(double t, std::size_t i) const;

  /// First recorded event with the given id, if any.
  const EventRecord* first_event(std::size_t event_id) const;

private:
  friend Trajectory integrate(const OdeProblem&, std::span<const EventSpec>,
                              const IntegratorOptions&);

  std::size_t segment_for(double t) const;
  double interpolate(std::size_t seg, double t, std::size_t i) const;

  std::size_t dim_ = 0;
  std::vector<double> times_;
  std::vector<State> states_;
  std::vector<EventRecord> events_;
  Termination termination_ = Termination::reached_tmax;
  // Five coefficient blocks of `dim_` entries per segment.
  std::vector<double> dense_;
  std::vector<double> steps_;
};

/// Integrates `problem` from t0 toward tmax. Precondition failures
/// (dimension mismatch, tmax <= t0, non-positive tolerances) throw
/// InvalidInput; numerical trouble is reported through termination().
Trajectory integrate(const OdeProblem& problem, std::span<const EventSpec> events,
                     const IntegratorOptions& options);

inline Trajectory integrate(const OdeProblem& problem, const IntegratorOptions& options) {
  return integrate(problem, {}, options);
}

/// The same ODE in reversed time s = -t: integrating the result from
/// s = -t_start to s = -t_stop walks the original system backward.
OdeProblem time_reversed(const Rhs& rhs, double t_start, State state_start, double t_stop);

} // namespace gflow::ode

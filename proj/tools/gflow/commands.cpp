#include "commands.hpp"

#include "gflow/error.hpp"
#include "gflow/hodge/identities.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

namespace gflow::cli {

namespace {

std::string fmt(double v) {
  if (!std::isfinite(v)) return io::format_number(v);
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string fmt(const std::optional<double>& v) { return v ? fmt(*v) : "none"; }

double tol(const Json& cfg, const char* key) { return cfg.at("tolerances").at(key).get<double>(); }

std::size_t grid_points(const Json& cfg, std::size_t fallback) {
  const auto g = cfg.at("tolerances").at("grid").get<long long>();
  if (g < 0) throw InvalidInput("tolerances.grid must be non-negative");
  return g == 0 ? fallback : static_cast<std::size_t>(g);
}

void require_healthy(ode::Termination t) {
  if (t == ode::Termination::step_underflow || t == ode::Termination::blowup)
    throw NumericalFailure("integration stopped: " + ode::to_string(t));
}

cylinder::CylinderTrajectory flow_from(const Json& cfg) {
  const double h0sq = num(cfg, "h0sq");
  if (h0sq < 0.0) throw InvalidInput("parameters.h0sq must be non-negative");
  const auto sign = integer(cfg, "h_sign");
  if (sign != 1 && sign != -1) throw InvalidInput("parameters.h_sign must be +1 or -1");
  cylinder::FlowOptions opts;
  opts.rtol = tol(cfg, "rtol");
  opts.atol = tol(cfg, "atol");
  opts.tmax = num(cfg, "tmax");
  opts.lambda_floor = num(cfg, "lambda_floor");
  auto traj = cylinder::run_flow(
      {num(cfg, "lambda0"), static_cast<double>(sign) * std::sqrt(h0sq), num(cfg, "beta0")}, opts);
  require_healthy(traj.path.termination());
  return traj;
}

Json flow_summary(const cylinder::CylinderTrajectory& traj) {
  return {{"initial",
           {{"lambda", io::number(traj.initial.lambda)},
            {"h", io::number(traj.initial.h)},
            {"beta", io::number(traj.initial.beta)}}},
          {"termination", ode::to_string(traj.path.termination())},
          {"t_end", io::number(traj.path.t_end())},
          {"t_floor", traj.t_floor ? io::number(*traj.t_floor) : Json(nullptr)},
          {"t_sing", traj.t_sing ? io::number(*traj.t_sing) : Json(nullptr)},
          {"accepted_steps", traj.steps.size()}};
}

RunResult run_cylinder(const Json& cfg) {
  const auto traj = flow_from(cfg);
  const double dt = num(cfg, "sample_dt");
  if (dt < 0.0) throw InvalidInput("parameters.sample_dt must be non-negative");
  std::vector<cylinder::FlowStep> rows;
  if (dt == 0.0) {
    rows = traj.steps;
  } else {
    for (std::size_t k = 0;; ++k) {
      const double t = static_cast<double>(k) * dt;
      if (t > traj.path.t_end()) break;
      rows.push_back(traj.sample(t));
    }
  }
  const auto diag = cylinder::diagnostics(traj);
  Json j = flow_summary(traj);
  j["diagnostics"] = io::to_json(diag);
  return {{{"cylinder.csv", io::cylinder_csv(rows)}, {"cylinder.json", io::dump(j)}},
          "cylinder-flow T_sing=" + fmt(traj.t_sing) + " drift=" + fmt(diag.conservation_drift) +
              " monotone=" + (diag.monotone ? "yes" : "no") + " rows=" + std::to_string(rows.size())};
}

RunResult run_blowup(const Json& cfg) {
  const auto traj = flow_from(cfg);
  const auto rep = cylinder::blowup_analysis(traj, static_cast<int>(integer(cfg, "n_samples")),
                                             num(cfg, "threshold"), num(cfg, "limit_tolerance"));
  io::CsvWriter csv({"t", "lambda_h2", "opening"});
  for (const auto& s : rep.samples) {
    const double row[] = {s.t, s.lambda_h2, s.opening};
    csv.row(row);
  }
  Json j = flow_summary(traj);
  j["blowup"] = io::to_json(rep);
  return {{{"blowup.csv", csv.str()}, {"blowup.json", io::dump(j)}},
          "blowup limit=" + fmt(rep.limit) + " error=" + fmt(rep.limit_error) +
              " opening_crossing=" + fmt(rep.opening_crossing)};
}

RunResult run_torsion(const Json& cfg) {
  const auto traj = flow_from(cfg);
  const auto n = integer(cfg, "n_samples");
  if (n < 2) throw InvalidInput("parameters.n_samples must be at least 2");
  const auto rep = cylinder::torsion_divergence(traj, num(cfg, "psi0"),
                                                static_cast<std::size_t>(n), num(cfg, "fit_depth"));
  io::CsvWriter csv({"t", "torsion_integral"});
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    const double row[] = {rep.times[i], rep.integral[i]};
    csv.row(row);
  }
  Json j = flow_summary(traj);
  j["torsion"] = io::to_json(rep);
  return {{{"torsion.csv", csv.str()}, {"torsion.json", io::dump(j)}},
          "torsion coefficient=" + fmt(rep.coefficient) + " crossing=" + fmt(rep.crossing_time)};
}

RunResult run_shoot(const Json& cfg) {
  shooter::ShootingOptions opts;
  opts.rtol = tol(cfg, "rtol");
  opts.atol = tol(cfg, "atol");
  opts.r_switch = num(cfg, "r_switch");
  opts.u_floor = num(cfg, "u_floor");
  opts.r_max = num(cfg, "r_max");
  const auto run = shooter::shoot_r3_branch_run(opts);
  require_healthy(run.report.termination);
  io::CsvWriter csv({"r", "u", "p", "E"});
  const auto& tr = run.trajectory;
  for (std::size_t i = 0; i < tr.size(); ++i) {
    const auto& y = tr.states()[i];
    const shooter::PhaseState s{tr.times()[i], y[0], y[1]};
    const double row[] = {s.r, s.u, s.p, s.u >= 0.0 ? shooter::orbit_invariant(s) : std::nan("")};
    csv.row(row);
  }
  const auto& r = run.report;
  return {{{"shoot.csv", csv.str()}, {"shoot.json", io::dump(io::to_json(r))}},
          "shoot r1=" + fmt(r.r1) + " r2=" + fmt(r.r2) + " r3=" + fmt(r.r3) + " r4=" + fmt(r.r4) +
              " u_max=" + fmt(r.u_max) + " drift=" + fmt(r.invariant_drift)};
}

warped::WarpedSolitonData example(const Json& cfg, double extent) {
  const auto name = text(cfg, "example");
  if (extent < 0.0) throw InvalidInput("profile extent must be non-negative");
  if (name == "gaussian") return extent > 0 ? warped::gaussian_shrinker(extent) : warped::gaussian_shrinker();
  return extent > 0 ? warped::cylinder_soliton(extent) : warped::cylinder_soliton();
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

RunResult run_soliton_residual(const Json& cfg) {
  const auto data = example(cfg, num(cfg, "extent"));
  const auto grid = warped::interior_grid(data, grid_points(cfg, 200));
  const auto ode = warped::ode_residuals(data, grid);
  const auto ten = warped::tensor_residuals(data, grid);
  const auto conv = warped::convention_check(data, grid, num(cfg, "convention_tol"));
  io::CsvWriter csv({"r", "r1", "r2", "r3", "tensor_metric", "tensor_torsion"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double row[] = {grid[i], ode.r1[i], ode.r2[i], ode.r3[i], ten.tensor_metric_residual[i],
                          ten.tensor_torsion_residual[i]};
    csv.row(row);
  }
  const double ode_max = std::max({max_abs(ode.r1), max_abs(ode.r2), max_abs(ode.r3)});
  const double ten_max =
      std::max(max_abs(ten.tensor_metric_residual), max_abs(ten.tensor_torsion_residual));
  Json j{{"example", text(cfg, "example")},
         {"points", grid.size()},
         {"lambda_ode", io::number(data.lambda_ode)},
         {"lambda_soliton", io::number(data.lambda_soliton)},
         {"ode_max", io::number(ode_max)},
         {"tensor_max", io::number(ten_max)},
         {"convention", io::to_json(conv)}};
  return {{{"residuals.csv", csv.str()}, {"residuals.json", io::dump(j)}},
          "soliton-residual " + text(cfg, "example") + " ode_max=" + fmt(ode_max) +
              " tensor_max=" + fmt(ten_max) + " convention=" + (conv.consistent ? "ok" : "failed")};
}

RunResult run_entropy(const Json& cfg) {
  const auto traj = flow_from(cfg);
  entropy::EntropyConfig ec;
  ec.mass0 = num(cfg, "mass0");
  const double t_ref = num(cfg, "t_ref");
  if (t_ref > 0.0) {
    ec.T_ref = t_ref;
  } else if (traj.t_sing) {
    ec.T_ref = *traj.t_sing;
  } else {
    throw InvalidInput("the run has no singular time; set parameters.t_ref");
  }
  const double top = std::min(ec.T_ref, traj.path.t_end());
  const double t_lo = num(cfg, "t_lo");
  const double t_hi = num(cfg, "t_hi") > 0.0 ? num(cfg, "t_hi") : 0.75 * top;
  const auto samples = integer(cfg, "samples");
  if (samples < 2) throw InvalidInput("parameters.samples must be at least 2");
  const auto n = static_cast<std::size_t>(samples);
  const double dt = num(cfg, "dt");
  const auto times = entropy::sample_times(traj, ec, t_lo, t_hi, n, dt);
  const auto trace = entropy::entropy_derivative_check(traj, ec, times, dt);

  const double odt = num(cfg, "order_dt");
  std::optional<double> order;
  const double o_lo = std::max(t_lo, 3.0 * odt), o_hi = std::min(t_hi, top - 3.0 * odt);
  if (odt > 0.0 && o_hi > o_lo)
    order = entropy::measured_fd_order(traj, ec, entropy::sample_times(traj, ec, o_lo, o_hi, n, odt),
                                       odt);
  const double drift =
      entropy::mass_drift(traj, entropy::initial_weight(traj, ec), ec.circle_length, t_hi);
  const auto negative = std::count_if(trace.dW_formula.begin(), trace.dW_formula.end(),
                                      [](double v) { return v < 0.0; });
  Json j = flow_summary(traj);
  j["entropy"] = {{"T_ref", io::number(ec.T_ref)},
                  {"dt", io::number(dt)},
                  {"max_gap", io::number(trace.max_gap)},
                  {"tolerance", io::number(trace.tolerance)},
                  {"within_tolerance", trace.within_tolerance},
                  {"fd_order", order ? io::number(*order) : Json(nullptr)},
                  {"min_formula", io::number(trace.min_formula)},
                  {"negative_formula_samples", negative},
                  {"mass_drift", io::number(drift)}};
  return {{{"entropy.csv", io::entropy_csv(trace)}, {"entropy.json", io::dump(j)}},
          "entropy T_ref=" + fmt(ec.T_ref) + " max_gap=" + fmt(trace.max_gap) +
              " order=" + fmt(order) + " min_formula=" + fmt(trace.min_formula) +
              " mass_drift=" + fmt(drift)};
}

RunResult run_heat_check(const Json& cfg) {
  const auto data = example(cfg, 0.0);
  const double r_max = num(cfg, "r_max"), dt = num(cfg, "dt"), dr = num(cfg, "dr");
  if (!(r_max > 0.1)) throw InvalidInput("parameters.r_max must exceed 0.1");
  const auto n = grid_points(cfg, 61);
  const auto grid = text(cfg, "example") == "gaussian" ? warped::linspace(0.1, r_max, n)
                                                       : warped::linspace(-r_max, r_max, n);
  const auto heat = entropy::soliton_heat_check(data, grid, dt);
  const auto heat2 = entropy::soliton_heat_check(data, grid, dt / 2);
  const auto pw = entropy::pointwise_monotonicity_check(data, grid, dt, dr);
  const auto pw2 = entropy::pointwise_monotonicity_check(data, grid, dt / 2, dr);
  io::CsvWriter csv({"r", "heat_lhs", "heat_rhs", "heat_residual", "pointwise_lhs",
                     "pointwise_rhs", "pointwise_residual"});
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double row[] = {grid[i], heat.lhs[i], heat.rhs[i], heat.residual[i],
                          pw.lhs[i],   pw.rhs[i],   pw.residual[i]};
    csv.row(row);
  }
  const double heat_order = entropy::convergence_order(heat, heat2);
  const double pw_order = entropy::convergence_order(pw, pw2);
  Json j{{"example", text(cfg, "example")},
         {"points", grid.size()},
         {"dt", io::number(dt)},
         {"dr", io::number(dr)},
         {"heat", {{"max_residual", io::number(heat.max_residual)},
                   {"half_step_residual", io::number(heat2.max_residual)},
                   {"order", io::number(heat_order)}}},
         {"pointwise", {{"max_residual", io::number(pw.max_residual)},
                        {"half_step_residual", io::number(pw2.max_residual)},
                        {"order", io::number(pw_order)}}}};
  return {{{"heat.csv", csv.str()}, {"heat.json", io::dump(j)}},
          "heat-check " + text(cfg, "example") + " heat=" + fmt(heat.max_residual) + " (order " +
              fmt(heat_order) + ") pointwise=" + fmt(pw.max_residual) + " (order " +
              fmt(pw_order) + ")"};
}

struct HodgeRow {
  std::string name;
  double residual;
  std::optional<double> coarse;
};

std::vector<HodgeRow> hodge_rows(int dim, std::size_t n, const std::string& form,
                                 const hodge::Potential& f, hodge::GradientMode mode,
                                 Json* integral) {
  const auto g = hodge::PeriodicGrid::cube(dim, n);
  const auto H = form == "closed" ? hodge::closed_t4_three_form(g) : hodge::sine_three_form(g);
  const auto tc = hodge::check_twisted_codiff(g, f, H, mode);
  const auto ii = hodge::check_integral_identity(g, f, H, mode);
  if (integral) *integral = {{"lhs", io::number(ii.lhs)}, {"rhs", io::number(ii.rhs)}};
  return {{"suobing", hodge::check_suobing(g, f, H, mode), {}},
          {"twisted_codiff", tc.first, {}},
          {"twisted_codiff_d", tc.second, {}},
          {"integral_identity", ii.relative_gap, {}},
          {"divH2", hodge::check_divH2(g, H), {}}};
}

RunResult run_hodge(const Json& cfg) {
  const auto dim = integer(cfg, "dim");
  if (dim != 3 && dim != 4) throw InvalidInput("parameters.dim must be 3 or 4");
  const int d = static_cast<int>(dim);
  std::string form = text(cfg, "form");
  if (form == "auto") form = d == 3 ? "sine" : "closed";
  auto axis = integer(cfg, "axis");
  if (axis == -1) axis = d == 3 ? 1 : 3;
  if (axis < 0 || axis >= dim) throw InvalidInput("parameters.axis is outside the torus");
  const auto f = hodge::cosine_potential(static_cast<int>(axis), num(cfg, "amplitude"),
                                         num(cfg, "shift"));
  const auto mode = text(cfg, "gradient") == "discrete" ? hodge::GradientMode::discrete
                                                         : hodge::GradientMode::analytic;
  const auto n = grid_points(cfg, d == 3 ? 64 : 48);
  const bool rate = flag(cfg, "rate");
  if (rate && n < 32) throw InvalidInput("a convergence rate needs a grid of at least 32 points");

  Json integral;
  auto rows = hodge_rows(d, n, form, f, mode, &integral);
  if (rate) {
    const auto coarse = hodge_rows(d, n / 2, form, f, mode, nullptr);
    for (std::size_t i = 0; i < rows.size(); ++i) rows[i].coarse = coarse[i].residual;
  }
  Json ids = Json::array();
  std::string summary = "hodge-check T" + std::to_string(d) + " n=" + std::to_string(n);
  for (const auto& r : rows) {
    Json rate_value = nullptr;
    if (r.coarse && *r.coarse > 0.0 && r.residual > 0.0)
      rate_value = io::number(hodge::convergence_rate(*r.coarse, r.residual));
    ids.push_back({{"identity", r.name},
                   {"residual", io::number(r.residual)},
                   {"coarse_residual", r.coarse ? io::number(*r.coarse) : Json(nullptr)},
                   {"rate", rate_value}});
    summary += " " + r.name + "=" + fmt(r.residual);
  }
  Json j{{"grid", {{"dim", d}, {"n", n}, {"coarse_n", rate ? Json(n / 2) : Json(nullptr)},
                   {"period", io::number(2.0 * std::acos(-1.0))}}},
         {"form", form},
         {"potential", {{"axis", axis}, {"amplitude", io::number(num(cfg, "amplitude"))},
                        {"shift", io::number(num(cfg, "shift"))}}},
         {"gradient", text(cfg, "gradient")},
         {"identities", ids},
         {"integral", integral}};
  return {{{"hodge.json", io::dump(j)}}, summary};
}

} // namespace

RunResult run_command(const Json& cfg) {
  const auto name = cfg.at("command").get<std::string>();
  if (name == "cylinder-flow") return run_cylinder(cfg);
  if (name == "blowup") return run_blowup(cfg);
  if (name == "torsion") return run_torsion(cfg);
  if (name == "shoot") return run_shoot(cfg);
  if (name == "soliton-residual") return run_soliton_residual(cfg);
  if (name == "entropy") return run_entropy(cfg);
  if (name == "heat-check") return run_heat_check(cfg);
  if (name == "hodge-check") return run_hodge(cfg);
  throw InvalidInput("unknown command " + name);
}

} // namespace gflow::cli

#include "fhadmm/stepper.hpp"

#include <cmath>
#include <sstream>

#include "fhadmm/errors.hpp"

namespace fhadmm {

Stepper::Stepper(const Grid& g, StepContext ctx) : grid_(g), ctx_(std::move(ctx)), symbol_(build_symbol(g)) {
  ctx_.potential.validate();
  ctx_.scheme.validate();
  ctx_.admm.validate();
  if (ctx_.snapshot_stride < 0) throw ConfigError("snapshot stride must be non-negative", "run.snapshot_stride");
  if (ctx_.snapshot_count < 0) throw ConfigError("snapshot count must be non-negative", "run.snapshot_count");
}

int Stepper::step_count(double t_final, double tau) {
  if (!(t_final > 0.0)) throw ConfigError("final time must be positive", "run.t_final");
  if (!(tau > 0.0)) throw ConfigError("time step must be positive", "scheme.tau");
  const double ratio = t_final / tau;
  const double steps = std::round(ratio);
  if (steps < 1.0 || std::abs(ratio - steps) > 1e-8 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os.precision(17);
    os << "t_final = " << t_final << " is not a whole number of steps of tau = " << tau;
    throw ConfigError(os.str(), "run.t_final");
  }
  return static_cast<int>(steps);
}

StepOutcome Stepper::finish(AdmmResult&& r, const ScalarField& u_n, std::optional<double> mass0) const {
  StepOutcome out{std::move(r.u_next), std::move(r.state.w2), {}, std::move(r.report)};
  StepReport& rep = out.report;
  rep.admm_iterations = out.admm.iterations;
  rep.criterion = out.admm.final_criterion;
  rep.energy = energy(out.u_next, ctx_.potential);
  rep.mass = mass(out.u_next);
  rep.mass_drift = rep.mass - (mass0 ? *mass0 : mass(u_n));
  rep.one_minus_max = 1.0 - max_value(out.u_next);
  rep.one_plus_min = 1.0 + min_value(out.u_next);
  rep.iterate_margin = out.admm.min_bound_margin;
  return out;
}

StepOutcome Stepper::step_first(const ScalarField& u_n, std::optional<double> mass0, const ScalarField* w_guess,
                                std::function<void(const IterationInfo&)> on_iteration) const {
  SchemeParams s = ctx_.scheme;
  s.order = 1;
  AdmmHooks hooks{&symbol_, w_guess, std::move(on_iteration)};
  return finish(admm_solve(u_n, nullptr, s, ctx_.potential, ctx_.admm, hooks), u_n, mass0);
}

StepOutcome Stepper::step_second(const ScalarField& u_n, const ScalarField& u_nm1, std::optional<double> mass0,
                                 const ScalarField* w_guess,
                                 std::function<void(const IterationInfo&)> on_iteration) const {
  SchemeParams s = ctx_.scheme;
  s.order = 2;
  AdmmHooks hooks{&symbol_, w_guess, std::move(on_iteration)};
  return finish(admm_solve(u_n, &u_nm1, s, ctx_.potential, ctx_.admm, hooks), u_n, mass0);
}

bool Stepper::snapshot_due(int step, int steps) const {
  if (ctx_.snapshot_stride > 0) return step % ctx_.snapshot_stride == 0 || step == steps;
  const int count = ctx_.snapshot_count;
  // steps j * steps / count for j = 1..count
  for (int j = 1; j <= count; ++j)
    if (static_cast<long long>(j) * steps / count == step) return true;
  return false;
}

Trajectory Stepper::run(const ScalarField& u0, double t_final, const StepObserver& observer) const {
  require_same_grid(u0.grid(), grid_);
  const double tau = ctx_.scheme.tau;
  const int steps = step_count(t_final, tau);

  Trajectory traj;
  traj.times.reserve(steps);
  traj.reports.reserve(steps);
  traj.snapshots.emplace_back(0.0, u0);

  const double mass0 = mass(u0);
  ScalarField u_prev = u0;
  ScalarField u = u0;
  std::optional<ScalarField> w;
  for (int n = 1; n <= steps; ++n) {
    const ScalarField* guess = ctx_.warm_start_w && w ? &*w : nullptr;
    StepOutcome out = (ctx_.scheme.order == 1 || n == 1) ? step_first(u, mass0, guess)
                                                         : step_second(u, u_prev, mass0, guess);
    out.report.step_index = n;
    out.report.time = n * tau;
    traj.times.push_back(out.report.time);
    traj.reports.push_back(out.report);
    if (observer) observer(out.report, out.u_next);
    if (snapshot_due(n, steps)) traj.snapshots.emplace_back(out.report.time, out.u_next);
    u_prev = std::move(u);
    u = std::move(out.u_next);
    w = std::move(out.w_next);
  }
  return traj;
}

StepOutcome step_first(const ScalarField& u_n, const StepContext& ctx) {
  return Stepper(u_n.grid(), ctx).step_first(u_n);
}

StepOutcome step_second(const ScalarField& u_n, const ScalarField& u_nm1, const StepContext& ctx) {
  return Stepper(u_n.grid(), ctx).step_second(u_n, u_nm1);
}

Trajectory run(const ScalarField& u0, double t_final, const StepContext& ctx, const StepObserver& observer) {
  return Stepper(u0.grid(), ctx).run(u0, t_final, observer);
}

}  // namespace fhadmm

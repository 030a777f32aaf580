#include <doctest.h>

#include <cmath>

#include "fhadmm/errors.hpp"
#include "fhadmm/initial.hpp"
#include "fhadmm/oracle.hpp"
#include "fhadmm/stepper.hpp"
#include "support.hpp"

using namespace fhadmm;
using fhadmm::test::max_abs_diff;
using fhadmm::test::smooth_random_field;

namespace {

StepContext cosine_context(const Grid& g, int order) {
  StepContext ctx;
  ctx.potential = PotentialParams::modified(3.0, 0.2);
  ctx.scheme.order = order;
  ctx.scheme.tau = order == 1 ? 0.4 * g.h() * g.h() : 0.8 * g.h();
  ctx.admm.rho_u = std::pow(ctx.scheme.tau, -0.5);
  ctx.admm.rho_w = std::sqrt(ctx.scheme.tau);
  ctx.admm.gamma = 1e-10;
  return ctx;
}

StepContext coarsening_context(int order, double tau) {
  StepContext ctx;
  ctx.potential = PotentialParams::original(3.0, 0.01);
  ctx.scheme = SchemeParams{order, tau, 1.0 / 16};
  ctx.admm.gamma = 1e-8;
  return ctx;
}

}  // namespace

TEST_CASE("step counts") {
  CHECK(Stepper::step_count(0.4, 0.001) == 400);
  CHECK(Stepper::step_count(1.0, 1e-3) == 1000);
  CHECK(Stepper::step_count(2.0, 0.01) == 200);
  CHECK(Stepper::step_count(0.3, 0.1) == 3);
  try {
    Stepper::step_count(0.25, 0.1);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.key() == "run.t_final");
  }
  CHECK_THROWS_AS(Stepper::step_count(0.0, 0.1), ConfigError);
  CHECK_THROWS_AS(Stepper::step_count(0.04, 0.1), ConfigError);
}

TEST_CASE("run produces one report per step at uniform times") {
  const Grid g(2, 16, 1.0);
  StepContext ctx = coarsening_context(1, 0.01);
  const Trajectory t = run(random_uniform(g, 0.0, -0.05, 0.05, 1), 3 * 0.01, ctx);
  REQUIRE(t.reports.size() == 3);
  REQUIRE(t.times.size() == 3);
  for (int n = 0; n < 3; ++n) {
    CHECK(t.times[n] == doctest::Approx((n + 1) * 0.01).epsilon(1e-15));
    CHECK(t.reports[n].step_index == n + 1);
    CHECK(t.reports[n].one_minus_max > 0.0);
    CHECK(t.reports[n].one_plus_min > 0.0);
    CHECK(t.reports[n].iterate_margin > 0.0);
    CHECK(t.reports[n].admm_iterations > 0);
    CHECK(t.reports[n].criterion <= ctx.admm.gamma);
  }
}

TEST_CASE("snapshot schedule") {
  const Grid g(2, 8, 1.0);
  StepContext ctx = coarsening_context(2, 0.01);
  ctx.snapshot_count = 3;
  const Stepper s(g, ctx);
  const Trajectory t = s.run(constant_field(g, 0.1), 0.09);
  REQUIRE(t.snapshots.size() == 4);
  CHECK(t.snapshots[0].first == 0.0);
  CHECK(t.snapshots[1].first == doctest::Approx(0.03));
  CHECK(t.snapshots[3].first == doctest::Approx(0.09));

  ctx.snapshot_stride = 4;
  const Trajectory u = Stepper(g, ctx).run(constant_field(g, 0.1), 0.1);
  REQUIRE(u.snapshots.size() == 4);
  CHECK(u.snapshots[1].first == doctest::Approx(0.04));
  CHECK(u.snapshots[2].first == doctest::Approx(0.08));
  CHECK(u.snapshots[3].first == doctest::Approx(0.1));

  ctx.snapshot_stride = 0;
  ctx.snapshot_count = 0;
  CHECK(Stepper(g, ctx).run(constant_field(g, 0.1), 0.05).snapshots.size() == 1);
}

TEST_CASE("constant states are fixed points of both steppers") {
  const Grid g(2, 8, 1.0);
  StepContext ctx = coarsening_context(1, 0.1);
  ctx.potential.c_lin = 0.0;
  ctx.admm.gamma = 1e-10;
  const ScalarField u(g, 0.42);
  const StepOutcome a = step_first(u, ctx);
  CHECK(max_abs_diff(a.u_next, u) <= 10 * ctx.admm.gamma);
  ctx.scheme.order = 2;
  const StepOutcome b = step_second(u, u, ctx);
  CHECK(max_abs_diff(b.u_next, u) <= 10 * ctx.admm.gamma);
}

TEST_CASE("second order without stabilization reduces to a first-order step") {
  const Grid g(2, 8, 1.0);
  StepContext ctx = coarsening_context(2, 0.03);
  ctx.potential = PotentialParams::original(3.0, 0.2);
  ctx.scheme.a_stab = 0.0;
  ctx.admm.gamma = 1e-11;
  const ScalarField u = smooth_random_field(g, 2, 0.0, 0.6);
  const StepOutcome second = step_second(u, u, ctx);
  StepContext first = ctx;
  first.scheme.order = 1;
  first.scheme.tau = 2.0 * ctx.scheme.tau / 3.0;
  const StepOutcome one = step_first(u, first);
  CHECK(max_abs_diff(second.u_next, one.u_next) <= 1e-9);
}

TEST_CASE("second-order step matches the dense solution") {
  const Grid g(2, 8, 1.0);
  StepContext ctx = coarsening_context(2, 0.01);
  ctx.potential = PotentialParams::original(3.0, 0.2);
  ctx.admm.gamma = 1e-10;
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const ScalarField un = smooth_random_field(g, seed, 0.1, 0.6);
    const ScalarField unm1 = smooth_random_field(g, seed + 5, 0.1, 0.6);
    const StepOutcome o = step_second(un, unm1, ctx);
    const DenseSolution d = dense_scheme_solve_detailed(un, &unm1, ctx.scheme, ctx.potential);
    CHECK(max_abs_diff(o.u_next, d.u) <= 1e-8);
    CHECK(scheme_residual(o.u_next, o.w_next, un, &unm1, ctx.scheme, ctx.potential) <= 1e-7);
    CHECK(o.report.mass_drift == doctest::Approx(mass(o.u_next) - mass(un)).epsilon(1e-12));
  }
}

TEST_CASE("first-order step respects the per-iteration mass bound at acceptance") {
  const Grid g(2, 16, 1.0);
  StepContext ctx = coarsening_context(1, 1e-3);
  const ScalarField un = random_uniform(g, 0.15, 0.0, 0.1, 42);
  const Stepper s(g, ctx);
  double lhs = 0.0, rhs = 0.0;
  const StepOutcome o = s.step_first(un, std::nullopt, nullptr, [&](const IterationInfo& info) {
    lhs = std::abs(mass(info.next.u2) - mass(un));
    rhs = ctx.admm.alpha * distance_l2(info.next.u1, info.next.u2) +
          ctx.admm.rho_w * distance_l2(info.prev.w2, info.next.w2);
  });
  CHECK(lhs <= rhs + 1e-12);
  CHECK(std::abs(o.report.mass_drift) == doctest::Approx(lhs).epsilon(1e-9).scale(1e-15));
}

TEST_CASE("energy decays and mass is conserved") {
  for (int order : {1, 2}) {
    const Grid g(2, 32, order == 1 ? 3.2 : 1.0);
    const StepContext ctx = order == 1 ? cosine_context(g, 1) : coarsening_context(2, 1e-3);
    const ScalarField u0 = order == 1 ? cosine_product(g) : random_uniform(g, 0.15, 0.0, 0.1, 3);
    const int steps = 12;
    const Trajectory t = run(u0, steps * ctx.scheme.tau, ctx);
    double last = energy(u0, ctx.potential);
    for (const StepReport& r : t.reports) {
      INFO("order " << order << " step " << r.step_index);
      CHECK(r.energy <= last + 10 * ctx.admm.gamma);
      last = r.energy;
      CHECK(r.one_minus_max > 0.0);
      CHECK(r.one_plus_min > 0.0);
    }
    const double bound = steps * (ctx.admm.alpha + ctx.admm.rho_w) * ctx.admm.gamma * 10 * std::sqrt(g.volume());
    CHECK(std::abs(t.reports.back().mass_drift) <= bound);
  }
}

TEST_CASE("warm-started chemical potential reaches the same solution") {
  const Grid g(2, 32, 1.0);
  StepContext cold = coarsening_context(2, 1e-3);
  cold.admm.gamma = 1e-10;
  StepContext warm = cold;
  warm.warm_start_w = true;
  const ScalarField u0 = random_uniform(g, 0.15, 0.0, 0.1, 7);
  const Trajectory a = run(u0, 5e-3, cold);
  const Trajectory b = run(u0, 5e-3, warm);
  CHECK(max_abs_diff(a.snapshots.back().second, b.snapshots.back().second) <= 1e-8);
}

TEST_CASE("stepper rejects mismatched grids and bad snapshot settings") {
  const Grid g(2, 8, 1.0);
  StepContext ctx = coarsening_context(1, 0.01);
  const Stepper s(g, ctx);
  CHECK_THROWS_AS(s.run(ScalarField(Grid(2, 16, 1.0)), 0.02), DomainError);
  ctx.snapshot_stride = -1;
  CHECK_THROWS_AS(Stepper(g, ctx), ConfigError);
}

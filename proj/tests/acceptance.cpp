#include <bit>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "fhadmm/admm.hpp"
#include "fhadmm/config.hpp"
#include "fhadmm/initial.hpp"
#include "fhadmm/io.hpp"
#include "fhadmm/oracle.hpp"
#include "fhadmm/spectral.hpp"
#include "fhadmm/stepper.hpp"
#include "support.hpp"

using namespace fhadmm;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

fs::path record_dir = "acceptance_records";
std::map<int, double> margins;

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

void record_margin(int criterion, double margin) {
  margins[criterion] = margin;
  fs::create_directories(record_dir);
  std::ofstream out(record_dir / fmt("margin_%d.txt", criterion));
  out.precision(17);
  out << margin << '\n';
}

double norm_l2(const VectorField& v) { return std::sqrt(inner(v, v)); }

double step_margin(const StepReport& r) { return std::min({r.iterate_margin, r.one_minus_max, r.one_plus_min}); }

RunConfig coarsening_preset(const std::string& name, const std::vector<std::string>& overrides) {
  return load_config(fs::path(FHADMM_CONFIG_DIR) / (name + ".conf"), ConfigMode::Run, overrides);
}

ConvergenceConfig cosine_study(int order) {
  ConvergenceConfig c;
  c.dim = 2;
  c.length = 3.2;
  c.ladder = {32, 64, 128, 256};
  c.order = order;
  c.refinement = order == 1 ? Refinement::Quadratic : Refinement::Linear;
  c.tau_coeff = order == 1 ? 0.4 : 0.8;
  c.t_final = 0.4;
  c.potential = PotentialParams::modified(3.0, 0.2);
  c.a_stab = 1.0 / 16.0;
  c.admm.alpha = 0.5;
  c.admm.gamma = 1e-10;
  c.rho_u = {1.0, -0.5};
  c.rho_w = {1.0, 0.5};
  c.initial = [](const Grid& g) { return cosine_product(g); };
  return c;
}

std::string rows_text(const ConvergenceResult& r) {
  std::string s;
  for (const ConvergenceRow& row : r.rows) {
    s += fmt(" %d/%d:delta=%.3e", row.n_coarse, row.n_fine, row.delta_l2);
    if (!std::isnan(row.rate)) s += fmt(",rate=%.3f", row.rate);
  }
  return s;
}

Verdict first_order_rates() {
  const ConvergenceResult r = convergence_study(cosine_study(1));
  record_margin(1, r.min_bound_margin);
  const double r1 = r.rows[1].rate, r2 = r.rows[2].rate;
  const bool ok = std::abs(r1 - 1.948) <= 0.15 && std::abs(r2 - 1.987) <= 0.15;
  return {ok, fmt("rates %.3f, %.3f (targets 1.948+-0.15, 1.987+-0.15);", r1, r2) + rows_text(r)};
}

Verdict second_order_rates() {
  const ConvergenceResult r = convergence_study(cosine_study(2));
  record_margin(2, r.min_bound_margin);
  const double r1 = r.rows[1].rate, r2 = r.rows[2].rate;
  const bool in_range = r1 >= 1.9 && r1 <= 2.5 && r2 >= 1.9 && r2 <= 2.5;
  const bool trending = std::abs(r2 - 2.0) <= std::abs(r1 - 2.0);
  return {in_range && trending,
          fmt("rates %.3f, %.3f (target [1.9, 2.5], trending to 2: %s);", r1, r2, trending ? "yes" : "no") +
              rows_text(r)};
}

Verdict oracle_equivalence() {
  const Grid g(2, 8, 1.0);
  const PotentialParams p = PotentialParams::original(3.0, 0.2);
  AdmmParams a;
  a.gamma = 1e-11;
  const double taus[] = {1e-3, 1e-2, 1e-1};
  double worst = 0.0, margin = 1.0;
  int count = 0;
  for (int order : {1, 2})
    for (int i = 0; i < 20; ++i) {
      const std::uint64_t seed = 1000 * order + i;
      const ScalarField un = test::random_field(g, seed, -0.8, 0.8);
      const ScalarField unm1 = test::random_field(g, seed + 500, -0.8, 0.8);
      const ScalarField* prev = order == 2 ? &unm1 : nullptr;
      const SchemeParams s{order, taus[i % 3], 1.0 / 16.0};
      const AdmmResult r = admm_solve(un, prev, s, p, a);
      const ScalarField d = dense_scheme_solve(un, prev, s, p);
      worst = std::max(worst, test::max_abs_diff(r.u_next, d));
      margin = std::min(margin, r.report.min_bound_margin);
      ++count;
    }
  record_margin(3, margin);
  return {worst <= 1e-8, fmt("%d instances, max |admm - dense| = %.3e (tol 1e-8)", count, worst)};
}

Verdict unconditional_convergence() {
  const RunConfig cfg = coarsening_preset("coarsening_2d", {"grid.n=32"});
  const Grid g = cfg.grid();
  const PotentialParams p = cfg.potential();
  const ScalarField u0 = cfg.initial_field(g);
  double margin = 1.0;
  bool ok = true;
  std::string detail = "2D N=32 iterations:";
  for (double tau : {1e-4, 1e-3, 1e-2, 1e-1, 1.0}) {
    const AdmmParams a = cfg.admm(tau);
    const AdmmResult first = admm_solve(u0, nullptr, SchemeParams{1, tau, cfg.a_stab}, p, a);
    const AdmmResult second = admm_solve(first.u_next, &u0, SchemeParams{2, tau, cfg.a_stab}, p, a);
    for (const AdmmResult* r : {&first, &second}) {
      ok = ok && r->report.converged && r->report.final_criterion <= a.gamma && r->report.iterations < a.max_iter;
      margin = std::min(margin, r->report.min_bound_margin);
    }
    detail += fmt(" tau=%g:%d/%d", tau, first.report.iterations, second.report.iterations);
  }

  const RunConfig c3 = coarsening_preset("coarsening_3d", {"grid.n=32"});
  const Trajectory t = run(c3.initial_field(c3.grid()), c3.t_final, c3.step_context());
  const int planned = Stepper::step_count(c3.t_final, c3.tau);
  int max_its = 0;
  for (const StepReport& r : t.reports) {
    margin = std::min(margin, step_margin(r));
    max_its = std::max(max_its, r.admm_iterations);
    ok = ok && r.criterion <= c3.gamma;
  }
  ok = ok && static_cast<int>(t.reports.size()) == planned;
  record_margin(4, margin);
  detail += fmt("; 3D N=32 tau=%g completed %zu/%d steps, max iterations %d", c3.tau, t.reports.size(), planned,
                max_its);
  return {ok, detail};
}

Verdict bound_preservation() {
  double worst = std::numeric_limits<double>::infinity();
  std::string detail = "min margin per criterion:";
  bool complete = true;
  for (int c = 1; c <= 4; ++c) {
    double m = std::numeric_limits<double>::quiet_NaN();
    if (margins.count(c)) {
      m = margins[c];
    } else {
      std::ifstream in(record_dir / fmt("margin_%d.txt", c));
      if (!(in >> m)) m = std::numeric_limits<double>::quiet_NaN();
    }
    if (std::isnan(m)) {
      complete = false;
      detail += fmt(" %d:missing", c);
      continue;
    }
    worst = std::min(worst, m);
    detail += fmt(" %d:%.3e", c, m);
  }
  return {complete && worst > 0.0, detail};
}

Verdict energy_dissipation() {
  const RunConfig cfg = coarsening_preset("coarsening_2d", {"grid.n=64", "run.t_final=0.2", "admm.gamma=1e-8"});
  const StepContext ctx = cfg.step_context();
  const ScalarField u0 = cfg.initial_field(cfg.grid());
  const Trajectory t = run(u0, cfg.t_final, ctx);
  double last = energy(u0, ctx.potential), worst = -std::numeric_limits<double>::infinity();
  for (const StepReport& r : t.reports) {
    worst = std::max(worst, r.energy - last);
    last = r.energy;
  }
  const double slack = 10.0 * ctx.admm.gamma;
  return {worst <= slack, fmt("%zu steps, largest per-step energy change %.3e (allowed %.1e)", t.reports.size(), worst,
                              slack)};
}

Verdict mass_bound() {
  const RunConfig cfg = coarsening_preset("coarsening_2d", {"grid.n=64", "run.t_final=0.2"});
  const StepContext ctx = cfg.step_context();
  const Grid g = cfg.grid();
  const Stepper stepper(g, ctx);
  const int steps = Stepper::step_count(cfg.t_final, cfg.tau);
  const ScalarField u0 = cfg.initial_field(g);
  const double m0 = mass(u0);

  double worst_excess = -std::numeric_limits<double>::infinity();
  long long checked = 0;
  double reference = 0.0;
  auto hook = [&](const IterationInfo& info) {
    const double lhs = std::abs(mass(info.next.u2) - reference);
    const double rhs =
        ctx.admm.alpha * distance_l2(info.next.u1, info.next.u2) + ctx.admm.rho_w * distance_l2(info.prev.w2, info.next.w2);
    worst_excess = std::max(worst_excess, lhs - rhs);
    ++checked;
  };

  ScalarField prev = u0, cur = u0;
  for (int n = 0; n < steps; ++n) {
    const bool second = ctx.scheme.order == 2 && n > 0;
    reference = second ? mass(second_order_targets(cur, prev).mass_ref) : mass(cur);
    StepOutcome o = second ? stepper.step_second(cur, prev, m0, nullptr, hook) : stepper.step_first(cur, m0, nullptr, hook);
    prev = std::move(cur);
    cur = std::move(o.u_next);
  }
  const double drift = std::abs(mass(cur) - m0);
  const bool ok = worst_excess <= 1e-12 && drift <= 1e-5;
  return {ok, fmt("%lld iterations over %d steps, max(lhs - rhs) = %.3e (allowed 1e-12), total drift %.3e (allowed 1e-5)",
                  checked, steps, worst_excess, drift)};
}

Verdict psi_monotonicity() {
  const RunConfig cfg = coarsening_preset("coarsening_2d", {"grid.n=16"});
  const Grid g = cfg.grid();
  const PotentialParams p = cfg.potential();
  const ScalarField un = cfg.initial_field(g);
  const SchemeParams s{1, cfg.tau, cfg.a_stab};
  AdmmParams deep = cfg.admm(cfg.tau);
  deep.gamma = 1e-13;
  const AdmmState ref = admm_solve(un, nullptr, s, p, deep).state;

  AdmmParams a = cfg.admm(cfg.tau);
  a.gamma = 1e-10;
  const double ru = a.rho_u, rw = a.rho_w;
  double worst_increase = -std::numeric_limits<double>::infinity();
  double worst_lemma = -std::numeric_limits<double>::infinity();
  double final_psi = 0.0;
  int iterations = 0;
  AdmmHooks hooks;
  hooks.on_iteration = [&](const IterationInfo& info) {
    const double before = psi(info.prev, ref, ru, rw);
    const double after = psi(info.next, ref, ru, rw);
    const double d2u = distance_l2(info.prev.u2, info.next.u2), d2w = distance_l2(info.prev.w2, info.next.w2);
    const double duu = distance_l2(info.next.u1, info.next.u2), dww = distance_l2(info.next.w1, info.next.w2);
    const double bound = ru * d2u * d2u + rw * d2w * d2w + ru * duu * duu + rw * dww * dww;
    worst_increase = std::max(worst_increase, after - before);
    worst_lemma = std::max(worst_lemma, bound - (before - after));
    final_psi = after;
    iterations = info.k;
  };
  admm_solve(un, nullptr, s, p, a, hooks);
  const bool ok = worst_increase <= 1e-9 && worst_lemma <= 1e-9 && final_psi <= 1e-18;
  return {ok, fmt("%d iterations, max increase %.3e, max lemma shortfall %.3e (slack 1e-9), final psi %.3e (allowed 1e-18)",
                  iterations, worst_increase, worst_lemma, final_psi)};
}

Verdict kernel_exactness() {
  double sbp = 0.0, spectral = 0.0;
  bool bitwise = true;
  for (int dim : {2, 3}) {
    const Grid g(dim, dim == 2 ? 32 : 12, 2.3);
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const ScalarField psi_f = test::random_field(g, seed), nu = test::random_field(g, seed + 10);
      const VectorField v = test::random_vector_field(g, seed + 20);
      const VectorField gp = gradient(psi_f), gn = gradient(nu);
      const ScalarField dv = divergence(v), ln = laplacian(nu);
      const double s1 = std::abs(inner(psi_f, dv) + inner(gp, v)) /
                        (fhadmm::norm_l2(psi_f) * fhadmm::norm_l2(dv) + norm_l2(gp) * norm_l2(v));
      const double s2 = std::abs(inner(psi_f, ln) + inner(gp, gn)) /
                        (fhadmm::norm_l2(psi_f) * fhadmm::norm_l2(ln) + norm_l2(gp) * norm_l2(gn));
      sbp = std::max({sbp, s1, s2});
    }

    const LaplacianSymbol sym = build_symbol(g);
    for (int order : {1, 2}) {
      const LinearRhs rhs{test::random_field(g, 40 + order), test::random_field(g, 50 + order)};
      const double tau = 0.01, eps2 = 0.04, c_lin = 3.0, a_stab = 1.0 / 16.0, alpha = 0.5, rho_u = 10.0, rho_w = 0.1;
      const LinearSolution x = order == 1
                                   ? solve_first_order_linear(rhs, sym, eps2, tau, alpha, rho_u, rho_w)
                                   : solve_second_order_linear(rhs, sym, eps2, tau, a_stab, c_lin, alpha, rho_u, rho_w);
      const double u_lap = order == 1 ? eps2 : eps2 + a_stab * tau * c_lin * c_lin;
      const double w_lap = order == 1 ? tau : 2.0 * tau / 3.0;
      const ScalarField ru = -u_lap * laplacian(x.u1) + rho_u * x.u1 - alpha * x.w1 - rhs.r_u;
      const ScalarField rw = -alpha * x.u1 + w_lap * laplacian(x.w1) - rho_w * x.w1 - rhs.r_w;
      spectral = std::max(spectral, std::hypot(norm_l2(ru), norm_l2(rw)) / std::hypot(norm_l2(rhs.r_u), norm_l2(rhs.r_w)));
    }

    const fs::path file = fs::temp_directory_path() / fmt("fhadmm_acceptance_%d.field", dim);
    const ScalarField f = test::random_field(g, 77, -0.999, 0.999);
    write_field(file, f);
    const ScalarField back = read_field(file);
    fs::remove(file);
    bitwise = bitwise && back.grid() == g;
    for (std::size_t i = 0; bitwise && i < g.size(); ++i)
      bitwise = std::bit_cast<std::uint64_t>(back[i]) == std::bit_cast<std::uint64_t>(f[i]);
  }
  const bool ok = sbp <= 1e-12 && spectral <= 1e-12 && bitwise;
  return {ok, fmt("summation by parts %.3e (tol 1e-12), spectral residual %.3e (tol 1e-12), round trip %s", sbp,
                  spectral, bitwise ? "bitwise" : "MISMATCH")};
}

struct Entry {
  int id;
  const char* name;
  std::function<Verdict()> check;
};

const std::vector<Entry> entries = {
    {1, "first-order convergence rates", first_order_rates},
    {2, "second-order convergence rates", second_order_rates},
    {3, "agreement with the dense solver", oracle_equivalence},
    {4, "convergence for every time step", unconditional_convergence},
    {5, "iterates stay inside (-1, 1)", bound_preservation},
    {6, "energy dissipation", energy_dissipation},
    {7, "mass variation bound", mass_bound},
    {8, "Lyapunov sequence decrease", psi_monotonicity},
    {9, "kernel exactness", kernel_exactness},
};

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--records" && i + 1 < argc) {
      record_dir = argv[++i];
    } else {
      selected.push_back(std::atoi(arg.c_str()));
    }
  }
  if (selected.empty())
    for (const Entry& e : entries) selected.push_back(e.id);

  int failures = 0;
  for (int id : selected) {
    const Entry* entry = nullptr;
    for (const Entry& e : entries)
      if (e.id == id) entry = &e;
    if (!entry) {
      std::printf("criterion %d: FAIL unknown criterion\n", id);
      ++failures;
      continue;
    }
    Verdict v;
    try {
      v = entry->check();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    std::printf("criterion %d (%s): %s %s\n", id, entry->name, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
    if (!v.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}

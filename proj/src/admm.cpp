#include "fhadmm/admm.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

#include "fhadmm/detail/log_block.hpp"
#include "fhadmm/errors.hpp"

namespace fhadmm {

void AdmmParams::validate() const {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie strictly inside (0, 1)", "admm.alpha");
  if (!(rho_u > 0.0) || !std::isfinite(rho_u)) throw ConfigError("rho_u must be positive", "admm.rho_u");
  if (!(rho_w > 0.0) || !std::isfinite(rho_w)) throw ConfigError("rho_w must be positive", "admm.rho_w");
  if (!(gamma > 0.0)) throw ConfigError("stopping tolerance must be positive", "admm.gamma");
  if (max_iter < 1) throw ConfigError("max_iter must be at least 1", "admm.max_iter");
  if (!(newton_tol > 0.0)) throw ConfigError("newton_tol must be positive", "admm.newton_tol");
  if (newton_max < 1) throw ConfigError("newton_max must be at least 1", "admm.newton_max");
  if (history_stride < 1) throw ConfigError("history_stride must be at least 1", "admm.history_stride");
}

namespace {

void require_interior(const ScalarField& u, const char* what) {
  const std::size_t n = u.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!(std::abs(u[i]) < 1.0)) {
      std::ostringstream os;
      os << what << ": value " << u[i] << " at flat index " << i << " is outside (-1, 1)";
      throw DomainError(os.str());
    }
  }
}

}  // namespace

AdmmState init_state(const ScalarField& u_n) {
  require_interior(u_n, "init_state");
  const Grid& g = u_n.grid();
  return {u_n, ScalarField(g), u_n, ScalarField(g), ScalarField(g), ScalarField(g)};
}

double scalar_log_root(double a, double b, double c_log, double v_init, double tol, int max_iter) {
  if (!(a >= 0.0) || !(c_log > 0.0) || !std::isfinite(b))
    throw DomainError("scalar_log_root: need a >= 0, c_log > 0 and finite b");
  if (!(std::abs(v_init) < 1.0)) throw DomainError("scalar_log_root: initial guess outside (-1, 1)");
  const detail::LogRoot r = detail::log_root(a, b, c_log, v_init, tol, max_iter);
  if (r.converged) return r.v;
  std::ostringstream os;
  os.precision(17);
  os << "scalar_log_root: no convergence in " << max_iter << " iterations (a = " << a << ", b = " << b
     << ", c_log = " << c_log << ", last v = " << r.v << ", residual = " << r.residual << ")";
  throw ConvergenceError(os.str());
}

SchemeTargets first_order_targets(const ScalarField& u_n) { return {u_n, u_n}; }

SchemeTargets second_order_targets(const ScalarField& u_n, const ScalarField& u_nm1) {
  require_same_grid(u_n.grid(), u_nm1.grid());
  SchemeTargets t{ScalarField(u_n.grid()), ScalarField(u_n.grid())};
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u_n.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    t.explicit_part[i] = 2.0 * u_n[i] - u_nm1[i];
    t.mass_ref[i] = (4.0 * u_n[i] - u_nm1[i]) / 3.0;
  }
  return t;
}

namespace {

[[noreturn]] void log_block_failure(double b, double v, double residual) {
  std::ostringstream os;
  os.precision(17);
  os << "logarithmic block: pointwise Newton did not converge (b = " << b << ", last v = " << v
     << ", residual = " << residual << ")";
  throw ConvergenceError(os.str());
}

detail::LogBlock log_block(const PotentialParams& p, const AdmmParams& params) {
  return {params.alpha, params.rho_u, params.rho_w, p.c_lin, p.c_log, params.newton_tol, params.newton_max};
}

void multiplier_kernel(AdmmState& s, double rho_u, double rho_w) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(s.u1.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    s.u3[i] += rho_u * (s.u1[i] - s.u2[i]);
    s.w3[i] += rho_w * (s.w1[i] - s.w2[i]);
  }
}

double two_term(const AdmmState& s) {
  const double du = distance_l2(s.u1, s.u2);
  const double dw = distance_l2(s.w1, s.w2);
  return std::sqrt(du * du + dw * dw);
}

}  // namespace

std::pair<ScalarField, ScalarField> nonlinear_subproblem(const AdmmState& state, const SchemeTargets& t,
                                                         const PotentialParams& p, const AdmmParams& params) {
  params.validate();
  require_interior(state.u2, "nonlinear_subproblem (u2 guess)");
  const detail::LogBlock blk = log_block(p, params);
  ScalarField u2(state.u2.grid()), w2(state.u2.grid());
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u2.size());
  std::ptrdiff_t bad = n;
#pragma omp parallel for reduction(min : bad) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double b = blk.rhs(state.u1[i], state.w1[i], state.u3[i], state.w3[i], t.explicit_part[i], t.mass_ref[i]);
    const detail::LogRoot r = detail::log_root(blk.a, b, blk.c_log, state.u2[i], blk.tol, blk.max_iter);
    if (!r.converged) bad = std::min(bad, i);
    u2[i] = r.v;
    w2[i] = blk.w2(r.v, state.w1[i], state.w3[i], t.mass_ref[i]);
  }
  if (bad < n) {
    const double b = blk.rhs(state.u1[bad], state.w1[bad], state.u3[bad], state.w3[bad], t.explicit_part[bad], t.mass_ref[bad]);
    const detail::LogRoot r = detail::log_root(blk.a, b, blk.c_log, state.u2[bad], blk.tol, blk.max_iter);
    log_block_failure(b, r.v, r.residual);
  }
  return {std::move(u2), std::move(w2)};
}

std::pair<ScalarField, ScalarField> nonlinear_subproblem_first(const AdmmState& state, const ScalarField& u_n,
                                                               const PotentialParams& p, const AdmmParams& params) {
  return nonlinear_subproblem(state, first_order_targets(u_n), p, params);
}

std::pair<ScalarField, ScalarField> nonlinear_subproblem_second(const AdmmState& state, const ScalarField& u_n,
                                                                const ScalarField& u_nm1, const PotentialParams& p,
                                                                const AdmmParams& params) {
  return nonlinear_subproblem(state, second_order_targets(u_n, u_nm1), p, params);
}

std::pair<ScalarField, ScalarField> update_multipliers(const AdmmState& state, double rho_u, double rho_w) {
  AdmmState s = state;
  multiplier_kernel(s, rho_u, rho_w);
  return {std::move(s.u3), std::move(s.w3)};
}

double stopping_criterion(const AdmmState& prev, const AdmmState& state, StoppingRule rule) {
  if (rule == StoppingRule::TwoTerm) return two_term(state);
  return distance_l2(state.u1, state.u2) + distance_l2(state.w1, state.w2) + distance_l2(prev.u1, state.u1) +
         distance_l2(prev.w1, state.w1);
}

double psi(const AdmmState& state, const AdmmState& reference, double rho_u, double rho_w) {
  const double eu3 = distance_l2(state.u3, reference.u3);
  const double ew3 = distance_l2(state.w3, reference.w3);
  const double eu2 = distance_l2(state.u2, reference.u2);
  const double ew2 = distance_l2(state.w2, reference.w2);
  return eu3 * eu3 / rho_u + ew3 * ew3 / rho_w + rho_u * eu2 * eu2 + rho_w * ew2 * ew2;
}

AdmmResult admm_solve(const ScalarField& u_n, const ScalarField* u_nm1, const SchemeParams& scheme,
                      const PotentialParams& p, const AdmmParams& params, const AdmmHooks& hooks) {
  scheme.validate();
  p.validate();
  params.validate();
  const bool second = scheme.order == 2;
  if (second != (u_nm1 != nullptr))
    throw ConfigError("previous level must be supplied exactly for the second-order scheme", "scheme.order");
  if (u_nm1) {
    require_same_grid(u_n.grid(), u_nm1->grid());
    require_interior(*u_nm1, "admm_solve (u_nm1)");
  }

  const Grid& g = u_n.grid();
  std::optional<LaplacianSymbol> own_symbol;
  if (!hooks.symbol) own_symbol = build_symbol(g);
  const LaplacianSymbol& sym = hooks.symbol ? *hooks.symbol : *own_symbol;
  require_same_grid(sym.grid, g);

  const SchemeTargets targets = second ? second_order_targets(u_n, *u_nm1) : first_order_targets(u_n);
  // u-equation coefficients; the explicit stabilization part A tau c_lin^2 Delta u^n moves to the rhs.
  const double stab = second ? scheme.a_stab * scheme.tau * p.c_lin * p.c_lin : 0.0;
  const double u_lap = p.eps2 + stab;
  const double w_lap = second ? 2.0 * scheme.tau / 3.0 : scheme.tau;
  std::optional<ScalarField> stab_term;
  if (second && stab != 0.0) stab_term = stab * laplacian(u_n);

  AdmmState state = init_state(u_n);
  if (hooks.w2_init) {
    require_same_grid(hooks.w2_init->grid(), g);
    state.w2 = *hooks.w2_init;
  }

  AdmmReport report;
  const bool keep_prev = static_cast<bool>(hooks.on_iteration);
  const bool four_term = params.rule == StoppingRule::FourTerm;
  std::optional<AdmmState> prev;
  CoupledModeSolver linear(sym, u_lap, w_lap, params.alpha, params.rho_u, params.rho_w);
  const detail::LogBlock blk = log_block(p, params);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(g.size());
  const double alpha = params.alpha, rho_u = params.rho_u, rho_w = params.rho_w;
  const double vol = g.cell_volume();
  const double* st = stab_term ? stab_term->data() : nullptr;
  const double* expl = targets.explicit_part.data();
  const double* mref = targets.mass_ref.data();
  double* u1 = state.u1.data();
  double* w1 = state.w1.data();
  double* u2 = state.u2.data();
  double* w2 = state.w2.data();
  double* u3 = state.u3.data();
  double* w3 = state.w3.data();

  double* ru = linear.u().data();
  double* rw = linear.w().data();
  auto linear_rhs = [&](std::ptrdiff_t i) {
    ru[i] = rho_u * u2[i] - u3[i] - (st ? st[i] : 0.0);
    rw[i] = -alpha * mref[i] + w3[i] - rho_w * w2[i];
  };
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) linear_rhs(i);

  for (int k = 1; k <= params.max_iter; ++k) {
    if (keep_prev) prev = state;

    // Linear block: (-eps2' Delta + rho_u) u1 - alpha w1 = rho_u u2 - u3 - stab Delta u^n
    //               -alpha u1 + (w_lap Delta - rho_w) w1 = -alpha M + w3 - rho_w w2
    linear.solve();

    // Logarithmic block, multiplier update, criterion sums and the next
    // linear right-hand side in one sweep.
    double du_sq = 0.0, dw_sq = 0.0, d1u_sq = 0.0, d1w_sq = 0.0;
    double mx = -1.0, mn = 1.0;
    std::ptrdiff_t bad = n;
#pragma omp parallel for reduction(+ : du_sq, dw_sq, d1u_sq, d1w_sq) reduction(max : mx) \
    reduction(min : mn, bad) schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      const double u1n = ru[i], w1n = rw[i];
      if (four_term) {
        d1u_sq += (u1n - u1[i]) * (u1n - u1[i]);
        d1w_sq += (w1n - w1[i]) * (w1n - w1[i]);
      }
      u1[i] = u1n;
      w1[i] = w1n;
      const double b = blk.rhs(u1n, w1n, u3[i], w3[i], expl[i], mref[i]);
      const detail::LogRoot r = detail::log_root(blk.a, b, blk.c_log, u2[i], blk.tol, blk.max_iter);
      if (!r.converged) bad = std::min(bad, i);
      const double v = r.v;
      const double w2n = blk.w2(v, w1n, w3[i], mref[i]);
      u2[i] = v;
      w2[i] = w2n;
      u3[i] += rho_u * (u1n - v);
      w3[i] += rho_w * (w1n - w2n);
      du_sq += (u1n - v) * (u1n - v);
      dw_sq += (w1n - w2n) * (w1n - w2n);
      mx = std::max(mx, v);
      mn = std::min(mn, v);
      linear_rhs(i);
    }
    if (bad < n) {
      std::ostringstream os;
      os << "ADMM iteration " << k << ": pointwise Newton did not converge at flat index " << bad;
      throw ConvergenceError(os.str(), std::move(report.residual_history));
    }
    report.min_bound_margin = std::min({report.min_bound_margin, 1.0 - mx, 1.0 + mn});

    const double crit = four_term ? std::sqrt(vol * du_sq) + std::sqrt(vol * dw_sq) + std::sqrt(vol * d1u_sq) +
                                        std::sqrt(vol * d1w_sq)
                                  : std::sqrt(vol * (du_sq + dw_sq));
    const bool done = crit <= params.gamma;
    if (k % params.history_stride == 0 || done || k == params.max_iter) report.residual_history.push_back(crit);
    report.iterations = k;
    report.final_criterion = crit;
    if (hooks.on_iteration) hooks.on_iteration(IterationInfo{k, *prev, state, crit});
    if (done) {
      report.converged = true;
      ScalarField u_next = state.u2;
      return {std::move(u_next), std::move(state), std::move(report)};
    }
  }
  std::ostringstream os;
  os << "ADMM did not reach gamma = " << params.gamma << " within " << params.max_iter
     << " iterations (last criterion " << report.final_criterion << ")";
  throw ConvergenceError(os.str(), std::move(report.residual_history));
}

}  // namespace fhadmm

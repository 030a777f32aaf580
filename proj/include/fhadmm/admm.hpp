#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "fhadmm/grid.hpp"
#include "fhadmm/potential.hpp"
#include "fhadmm/spectral.hpp"

namespace fhadmm {

enum class StoppingRule {
  /// sqrt(||u1 - u2||^2 + ||w1 - w2||^2)
  TwoTerm,
  /// ||u1 - u2|| + ||w1 - w2|| + ||u1_prev - u1|| + ||w1_prev - w1||
  FourTerm,
};

struct AdmmParams {
  double alpha = 0.5;
  double rho_u = 1.0;
  double rho_w = 1.0;
  double gamma = 1e-8;
  int max_iter = 100000;
  double newton_tol = 1e-13;
  int newton_max = 100;
  StoppingRule rule = StoppingRule::TwoTerm;
  /// Keep every history_stride-th criterion value (and always the last).
  int history_stride = 1;

  void validate() const;
};

/// Iterates (u1, w1) of the linear block, (u2, w2) of the logarithmic block
/// and multipliers (u3, w3).
struct AdmmState {
  ScalarField u1, w1, u2, w2, u3, w3;
};

struct AdmmReport {
  int iterations = 0;
  double final_criterion = 0.0;
  std::vector<double> residual_history;
  bool converged = false;
  /// min over all iterates of min(1 - max u2, 1 + min u2).
  double min_bound_margin = 1.0;
};

/// u2 = u_n, u1 = u_n, everything else zero. Throws DomainError if |u_n| >= 1 anywhere.
AdmmState init_state(const ScalarField& u_n);

/// Root of c_log log((1+v)/(1-v)) + a v = b in (-1, 1). Newton from v_init,
/// falling back to bisection on a maintained bracket whenever a step leaves
/// the bracket or fails to reduce the residual. When the root lies closer
/// to +-1 than the double spacing allows, the nearest representable interior
/// point is returned.
double scalar_log_root(double a, double b, double c_log, double v_init, double tol = 1e-13, int max_iter = 100);

/// Right-hand sides the logarithmic block sees:
///  explicit_part multiplies c_lin (u^n, or 2u^n - u^{n-1});
///  mass_ref is the known part of the mass equation (u^n, or (4u^n - u^{n-1})/3).
struct SchemeTargets {
  ScalarField explicit_part;
  ScalarField mass_ref;
};

SchemeTargets first_order_targets(const ScalarField& u_n);
SchemeTargets second_order_targets(const ScalarField& u_n, const ScalarField& u_nm1);

/// Solves the logarithmic block cell by cell, warm-started from state.u2.
/// Returns (u2, w2).
std::pair<ScalarField, ScalarField> nonlinear_subproblem(const AdmmState& state, const SchemeTargets& t,
                                                         const PotentialParams& p, const AdmmParams& params);
std::pair<ScalarField, ScalarField> nonlinear_subproblem_first(const AdmmState& state, const ScalarField& u_n,
                                                               const PotentialParams& p, const AdmmParams& params);
std::pair<ScalarField, ScalarField> nonlinear_subproblem_second(const AdmmState& state, const ScalarField& u_n,
                                                                const ScalarField& u_nm1, const PotentialParams& p,
                                                                const AdmmParams& params);

/// Returns (u3 + rho_u (u1 - u2), w3 + rho_w (w1 - w2)).
std::pair<ScalarField, ScalarField> update_multipliers(const AdmmState& state, double rho_u, double rho_w);

double stopping_criterion(const AdmmState& prev, const AdmmState& state, StoppingRule rule = StoppingRule::TwoTerm);

/// Lyapunov distance of `state` to a stationary point `reference`:
/// ||du3||^2/rho_u + ||dw3||^2/rho_w + rho_u ||du2||^2 + rho_w ||dw2||^2.
double psi(const AdmmState& state, const AdmmState& reference, double rho_u, double rho_w);

struct IterationInfo {
  int k;  // iteration just completed (1-based)
  const AdmmState& prev;
  const AdmmState& next;
  double criterion;
};

struct AdmmHooks {
  /// Reused across calls when provided; built on the fly otherwise.
  const LaplacianSymbol* symbol = nullptr;
  /// Initial w2; zero when absent.
  const ScalarField* w2_init = nullptr;
  std::function<void(const IterationInfo&)> on_iteration;
};

struct AdmmResult {
  ScalarField u_next;
  AdmmState state;
  AdmmReport report;
};

/// One implicit time step of the convex-splitting scheme of order
/// scheme.order. `u_nm1` must be non-null exactly when order == 2.
/// Returns u2 at termination. Throws ConvergenceError after max_iter.
AdmmResult admm_solve(const ScalarField& u_n, const ScalarField* u_nm1, const SchemeParams& scheme,
                      const PotentialParams& p, const AdmmParams& params, const AdmmHooks& hooks = {});

}  // namespace fhadmm

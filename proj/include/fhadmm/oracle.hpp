#pragma once

#include <functional>
#include <vector>

#include "fhadmm/admm.hpp"
#include "fhadmm/grid.hpp"
#include "fhadmm/potential.hpp"

namespace fhadmm {

struct DenseSolution {
  ScalarField u;
  ScalarField w;
  /// l-infinity norm of both scheme equations at (u, w).
  double residual = 0.0;
  int newton_iterations = 0;
};

/// Solves the convex-splitting scheme directly: damped Newton on the coupled
/// 2 N^dim system with a dense assembled Laplacian. Test-scale only
/// (N <= 16, at most 1024 cells). Throws ConvergenceError on failure.
DenseSolution dense_scheme_solve_detailed(const ScalarField& u_n, const ScalarField* u_nm1, const SchemeParams& scheme,
                                          const PotentialParams& p);
ScalarField dense_scheme_solve(const ScalarField& u_n, const ScalarField* u_nm1, const SchemeParams& scheme,
                               const PotentialParams& p);

/// Residuals (l-infinity) of the scheme equations at (u, w), evaluated with
/// the stencil Laplacian.
double scheme_residual(const ScalarField& u, const ScalarField& w, const ScalarField& u_n, const ScalarField* u_nm1,
                       const SchemeParams& scheme, const PotentialParams& p);

/// Block average of the 2^dim fine cells covering each coarse cell.
ScalarField restrict_field(const ScalarField& fine);

/// c * tau^e, e.g. rho_u = tau^-1/2.
struct TauPowerLaw {
  double coefficient = 1.0;
  double exponent = 0.0;
  double at(double tau) const;
};

enum class Refinement { Quadratic, Linear };

struct ConvergenceConfig {
  int dim = 2;
  double length = 3.2;
  std::vector<int> ladder;
  int order = 1;
  Refinement refinement = Refinement::Quadratic;
  /// tau = tau_coeff * h^2 (quadratic) or tau_coeff * h (linear).
  double tau_coeff = 0.4;
  double t_final = 0.4;
  PotentialParams potential;
  double a_stab = 1.0 / 16.0;
  AdmmParams admm;
  TauPowerLaw rho_u{1.0, -0.5};
  TauPowerLaw rho_w{1.0, 0.5};
  std::function<ScalarField(const Grid&)> initial;
  /// Optional progress hook: (N, steps done, steps total).
  std::function<void(int, int, int)> progress;
};

struct ConvergenceRow {
  int n_coarse = 0;
  int n_fine = 0;
  double h_coarse = 0.0;
  double h_fine = 0.0;
  double delta_l2 = 0.0;
  /// log2(previous delta / this delta); NaN on the first row.
  double rate = 0.0;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  /// Smallest bound margin over every ADMM iterate of every run.
  double min_bound_margin = 1.0;
  /// Final fields keyed by ladder position.
  std::vector<ScalarField> finals;
};

double refinement_tau(const ConvergenceConfig& c, double h);

/// Runs every ladder resolution to t_final and compares consecutive pairs
/// through restrict_field. Ladder entries must double.
ConvergenceResult convergence_study(const ConvergenceConfig& config);

}  // namespace fhadmm

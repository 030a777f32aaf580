#pragma once

#include "fhadmm/grid.hpp"

namespace fhadmm {

/// Generalized Flory-Huggins free energy
///
///   E_h(u) = c_log <(1+u)log(1+u) + (1-u)log(1-u), 1> - (c_lin/2) ||u||^2
///            + (eps2/2) ||grad_h u||^2 + c_const |Omega|
///
/// Both the classical form (c_log = 1, c_lin = theta0) and the rescaled form
/// used for the cosine benchmark (everything divided by 2 theta0, shifted by
/// 1/(4 theta0)) are instances.
struct PotentialParams {
  double c_log = 1.0;
  double c_lin = 3.0;
  double c_const = 0.0;
  double eps2 = 1e-4;

  static PotentialParams original(double theta0, double eps);
  /// (1/(2 theta0)) [(1+u)log(1+u) + (1-u)log(1-u) - (u^2 - 1)/2] + eps^2/2 |grad u|^2
  static PotentialParams modified(double theta0, double eps);

  void validate() const;
};

struct SchemeParams {
  int order = 1;
  double tau = 1e-3;
  /// Stabilization A of the second-order scheme. Values below 1/16 are
  /// accepted but lose the modified-energy guarantee.
  double a_stab = 1.0 / 16.0;

  void validate() const;
  bool below_recommended_stabilization() const noexcept { return order == 2 && a_stab < 1.0 / 16.0; }
};

/// Logarithmic part of the chemical potential, c_log * (log(1+v) - log(1-v)).
double chemical_nonlinearity(double v, const PotentialParams& p);

/// Discrete free energy. Throws DomainError naming the first offending cell
/// if any |u| >= 1.
double energy(const ScalarField& u, const PotentialParams& p);

}  // namespace fhadmm

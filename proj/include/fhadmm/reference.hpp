#pragma once

// Plain single-threaded versions of the data-parallel kernels. They are the
// yardstick for the OpenMP kernels in tests and in the benchmark.

#include <utility>

#include "fhadmm/admm.hpp"
#include "fhadmm/grid.hpp"

namespace fhadmm::reference {

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
/// Textbook (sum of neighbors - 2 dim center) / h^2 form.
ScalarField laplacian(const ScalarField& f);
double inner(const ScalarField& a, const ScalarField& b);

std::pair<ScalarField, ScalarField> nonlinear_subproblem(const AdmmState& state, const SchemeTargets& t,
                                                         const PotentialParams& p, const AdmmParams& params);
std::pair<ScalarField, ScalarField> update_multipliers(const AdmmState& state, double rho_u, double rho_w);

}  // namespace fhadmm::reference

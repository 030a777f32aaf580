#include "fhadmm/potential.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fhadmm/errors.hpp"

namespace fhadmm {

PotentialParams PotentialParams::original(double theta0, double eps) {
  PotentialParams p{1.0, theta0, 0.0, eps * eps};
  p.validate();
  return p;
}

PotentialParams PotentialParams::modified(double theta0, double eps) {
  if (!(theta0 > 0.0)) throw ConfigError("theta0 must be positive", "potential.theta0");
  const double s = 1.0 / (2.0 * theta0);
  PotentialParams p{s, s, 0.5 * s, eps * eps};
  p.validate();
  return p;
}

void PotentialParams::validate() const {
  if (!(c_log > 0.0) || !std::isfinite(c_log)) throw ConfigError("c_log must be positive", "potential.c_log");
  if (!(c_lin >= 0.0) || !std::isfinite(c_lin)) throw ConfigError("c_lin must be non-negative", "potential.theta0");
  if (!(eps2 > 0.0) || !std::isfinite(eps2)) throw ConfigError("eps must be positive", "potential.eps");
  if (!std::isfinite(c_const)) throw ConfigError("c_const must be finite", "potential.c_const");
}

void SchemeParams::validate() const {
  if (order != 1 && order != 2) throw ConfigError("order must be 1 or 2", "scheme.order");
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("time step must be positive", "scheme.tau");
  if (!(a_stab >= 0.0) || !std::isfinite(a_stab)) throw ConfigError("stabilization must be non-negative", "scheme.a_stab");
}

double chemical_nonlinearity(double v, const PotentialParams& p) {
  if (!(std::abs(v) < 1.0)) {
    std::ostringstream os;
    os << "chemical potential undefined at v = " << v;
    throw DomainError(os.str());
  }
  return 2.0 * p.c_log * std::atanh(v);
}

double energy(const ScalarField& u, const PotentialParams& p) {
  const Grid& g = u.grid();
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(u.size());
  const double* v = u.data();
  std::ptrdiff_t bad = n;
  double entropy = 0.0, sq = 0.0;
#pragma omp parallel for reduction(+ : entropy, sq) reduction(min : bad) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double x = v[i];
    if (!(std::abs(x) < 1.0)) {
      bad = std::min(bad, i);
      continue;
    }
    entropy += (1.0 + x) * std::log1p(x) + (1.0 - x) * std::log1p(-x);
    sq += x * x;
  }
  if (bad < n) {
    const int N = g.n();
    std::ostringstream os;
    os << "energy: |u| >= 1 at cell (" << bad % N << ", " << (bad / N) % N;
    if (g.dim() == 3) os << ", " << bad / (static_cast<std::ptrdiff_t>(N) * N);
    os << "), value " << v[bad];
    throw DomainError(os.str());
  }
  const VectorField grad = gradient(u);
  const double w = g.cell_volume();
  return p.c_log * w * entropy - 0.5 * p.c_lin * w * sq + 0.5 * p.eps2 * inner(grad, grad) + p.c_const * g.volume();
}

}  // namespace fhadmm

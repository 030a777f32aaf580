#include "fhadmm/reference.hpp"

namespace fhadmm::reference {

namespace {

int wrap(int i, int n) { return ((i % n) + n) % n; }

}  // namespace

VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid();
  const int n = g.n(), nz = g.dim() == 3 ? n : 1;
  VectorField out(g);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double c = f.at(i, j, k);
        out.component(0)[g.index(i, j, k)] = (f.at(wrap(i + 1, n), j, k) - c) / g.h();
        out.component(1)[g.index(i, j, k)] = (f.at(i, wrap(j + 1, n), k) - c) / g.h();
        if (g.dim() == 3) out.component(2)[g.index(i, j, k)] = (f.at(i, j, wrap(k + 1, n)) - c) / g.h();
      }
  return out;
}

ScalarField divergence(const VectorField& v) {
  const Grid& g = v.grid();
  const int n = g.n(), nz = g.dim() == 3 ? n : 1;
  ScalarField out(g);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const std::size_t c = g.index(i, j, k);
        double acc = (v.component(0)[c] - v.component(0)[g.index(wrap(i - 1, n), j, k)]) / g.h();
        acc += (v.component(1)[c] - v.component(1)[g.index(i, wrap(j - 1, n), k)]) / g.h();
        if (g.dim() == 3) acc += (v.component(2)[c] - v.component(2)[g.index(i, j, wrap(k - 1, n))]) / g.h();
        out[c] = acc;
      }
  return out;
}

ScalarField laplacian(const ScalarField& f) {
  const Grid& g = f.grid();
  const int n = g.n(), nz = g.dim() == 3 ? n : 1;
  const double inv_h2 = 1.0 / (g.h() * g.h());
  ScalarField out(g);
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double s = f.at(wrap(i + 1, n), j, k) + f.at(wrap(i - 1, n), j, k) + f.at(i, wrap(j + 1, n), k) +
                   f.at(i, wrap(j - 1, n), k) - 2.0 * g.dim() * f.at(i, j, k);
        if (g.dim() == 3) s += f.at(i, j, wrap(k + 1, n)) + f.at(i, j, wrap(k - 1, n));
        out.at(i, j, k) = s * inv_h2;
      }
  return out;
}

double inner(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc * a.grid().cell_volume();
}

std::pair<ScalarField, ScalarField> nonlinear_subproblem(const AdmmState& s, const SchemeTargets& t,
                                                         const PotentialParams& p, const AdmmParams& params) {
  const double beta = 1.0 - params.alpha;
  const double a = params.rho_u + beta * beta / params.rho_w;
  ScalarField u2(s.u2.grid()), w2(s.u2.grid());
  for (std::size_t i = 0; i < u2.size(); ++i) {
    const double b = p.c_lin * t.explicit_part[i] + beta * s.w1[i] + beta * s.w3[i] / params.rho_w +
                     beta * beta * t.mass_ref[i] / params.rho_w + s.u3[i] + params.rho_u * s.u1[i];
    u2[i] = scalar_log_root(a, b, p.c_log, s.u2[i], params.newton_tol, params.newton_max);
    w2[i] = s.w1[i] + (s.w3[i] + beta * (t.mass_ref[i] - u2[i])) / params.rho_w;
  }
  return {std::move(u2), std::move(w2)};
}

std::pair<ScalarField, ScalarField> update_multipliers(const AdmmState& s, double rho_u, double rho_w) {
  ScalarField u3 = s.u3, w3 = s.w3;
  for (std::size_t i = 0; i < u3.size(); ++i) {
    u3[i] += rho_u * (s.u1[i] - s.u2[i]);
    w3[i] += rho_w * (s.w1[i] - s.w2[i]);
  }
  return {std::move(u3), std::move(w3)};
}

}  // namespace fhadmm::reference

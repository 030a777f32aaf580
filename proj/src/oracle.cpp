#include "fhadmm/oracle.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fhadmm/errors.hpp"
#include "fhadmm/stepper.hpp"

namespace fhadmm {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Dense periodic Laplacian assembled from the neighbor lists, independent of
// the stencil kernels.
MatrixXd dense_laplacian(const Grid& g) {
  const int n = g.n();
  const int nz = g.dim() == 3 ? n : 1;
  const Eigen::Index m = static_cast<Eigen::Index>(g.size());
  MatrixXd D = MatrixXd::Zero(m, m);
  const double c = 1.0 / (g.h() * g.h());
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const auto row = static_cast<Eigen::Index>(g.index(i, j, k));
        D(row, row) -= 2.0 * g.dim() * c;
        const int nb[6][3] = {{(i + 1) % n, j, k}, {(i + n - 1) % n, j, k}, {i, (j + 1) % n, k},
                              {i, (j + n - 1) % n, k}, {i, j, (k + 1) % n}, {i, j, (k + n - 1) % n}};
        for (int q = 0; q < 2 * g.dim(); ++q)
          D(row, static_cast<Eigen::Index>(g.index(nb[q][0], nb[q][1], nb[q][2]))) += c;
      }
  return D;
}

VectorXd as_vector(const ScalarField& f) { return Eigen::Map<const VectorXd>(f.data(), static_cast<Eigen::Index>(f.size())); }

ScalarField as_field(const Grid& g, const VectorXd& v) { return ScalarField(g, std::vector<double>(v.data(), v.data() + v.size())); }

struct SchemeTerms {
  VectorXd mass_ref;      // u^n or (4u^n - u^{n-1})/3
  VectorXd explicit_rhs;  // known part of the w-equation
  double tau_eff;         // tau or 2 tau / 3
  double kappa;           // eps2 (+ A tau c_lin^2)
};

SchemeTerms scheme_terms(const MatrixXd& D, const ScalarField& u_n, const ScalarField* u_nm1, const SchemeParams& s,
                         const PotentialParams& p) {
  const VectorXd un = as_vector(u_n);
  if (s.order == 1) return {un, p.c_lin * un, s.tau, p.eps2};
  const VectorXd um = as_vector(*u_nm1);
  const double stab = s.a_stab * s.tau * p.c_lin * p.c_lin;
  // w = c_log g(u) - c_lin (2u^n - u^{n-1}) - (eps2 + stab) D u + stab D u^n
  return {(4.0 * un - um) / 3.0, p.c_lin * (2.0 * un - um) - stab * (D * un), 2.0 * s.tau / 3.0, p.eps2 + stab};
}

// F1 = u - mass_ref - tau_eff D w
// F2 = w - c_log log((1+u)/(1-u)) + explicit_rhs + kappa D u
VectorXd residual_vector(const MatrixXd& D, const SchemeTerms& t, const PotentialParams& p, const VectorXd& u,
                         const VectorXd& w) {
  const Eigen::Index m = u.size();
  VectorXd F(2 * m);
  F.head(m) = u - t.mass_ref - t.tau_eff * (D * w);
  VectorXd logterm(m);
  for (Eigen::Index i = 0; i < m; ++i) logterm[i] = p.c_log * (std::log1p(u[i]) - std::log1p(-u[i]));
  F.tail(m) = w - logterm + t.explicit_rhs + t.kappa * (D * u);
  return F;
}

void check_oracle_inputs(const ScalarField& u_n, const ScalarField* u_nm1, const SchemeParams& s) {
  s.validate();
  if ((s.order == 2) != (u_nm1 != nullptr))
    throw ConfigError("previous level must be supplied exactly for the second-order scheme", "scheme.order");
  const Grid& g = u_n.grid();
  if (g.n() > 16 || g.size() > 1024) throw ConfigError("dense oracle is limited to N <= 16 and 1024 cells", "grid.n");
  if (u_nm1) require_same_grid(g, u_nm1->grid());
}

}  // namespace

double scheme_residual(const ScalarField& u, const ScalarField& w, const ScalarField& u_n, const ScalarField* u_nm1,
                       const SchemeParams& scheme, const PotentialParams& p) {
  // Field-kernel version so it also works above oracle scale.
  const Grid& g = u.grid();
  ScalarField mass_ref = u_n;
  ScalarField explicit_rhs = p.c_lin * u_n;
  double tau_eff = scheme.tau, kappa = p.eps2;
  if (scheme.order == 2) {
    const double stab = scheme.a_stab * scheme.tau * p.c_lin * p.c_lin;
    mass_ref = (1.0 / 3.0) * (4.0 * u_n - *u_nm1);
    explicit_rhs = p.c_lin * (2.0 * u_n - *u_nm1) - stab * laplacian(u_n);
    tau_eff = 2.0 * scheme.tau / 3.0;
    kappa += stab;
  }
  const ScalarField lw = laplacian(w);
  const ScalarField lu = laplacian(u);
  double r = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double f1 = u[i] - mass_ref[i] - tau_eff * lw[i];
    const double f2 = w[i] - p.c_log * (std::log1p(u[i]) - std::log1p(-u[i])) + explicit_rhs[i] + kappa * lu[i];
    r = std::max({r, std::abs(f1), std::abs(f2)});
  }
  return r;
}

DenseSolution dense_scheme_solve_detailed(const ScalarField& u_n, const ScalarField* u_nm1, const SchemeParams& scheme,
                                          const PotentialParams& p) {
  check_oracle_inputs(u_n, u_nm1, scheme);
  p.validate();
  const Grid& g = u_n.grid();
  for (std::size_t i = 0; i < g.size(); ++i)
    if (!(std::abs(u_n[i]) < 1.0) || (u_nm1 && !(std::abs((*u_nm1)[i]) < 1.0)))
      throw DomainError("dense oracle: input outside (-1, 1)");

  const MatrixXd D = dense_laplacian(g);
  const SchemeTerms terms = scheme_terms(D, u_n, u_nm1, scheme, p);
  const Eigen::Index m = static_cast<Eigen::Index>(g.size());
  constexpr double kBound = 1.0 - 1e-12;
  constexpr double kTol = 1e-12;
  constexpr double kMinStep = 1e-12;
  constexpr int kMaxNewton = 200;

  // Start from the previous level and the chemical potential it implies.
  VectorXd u = as_vector(u_n);
  VectorXd w(m);
  {
    const VectorXd Du = D * u;
    for (Eigen::Index i = 0; i < m; ++i)
      w[i] = p.c_log * (std::log1p(u[i]) - std::log1p(-u[i])) - terms.explicit_rhs[i] - terms.kappa * Du[i];
  }
  VectorXd F = residual_vector(D, terms, p, u, w);
  double fnorm = F.lpNorm<Eigen::Infinity>();

  MatrixXd J(2 * m, 2 * m);
  int it = 0;
  for (; it < kMaxNewton && fnorm > kTol; ++it) {
    J.setZero();
    J.topLeftCorner(m, m).setIdentity();
    J.topRightCorner(m, m) = -terms.tau_eff * D;
    J.bottomLeftCorner(m, m) = terms.kappa * D;
    for (Eigen::Index i = 0; i < m; ++i) J(m + i, i) -= 2.0 * p.c_log / ((1.0 - u[i]) * (1.0 + u[i]));
    J.bottomRightCorner(m, m).setIdentity();
    const VectorXd delta = J.partialPivLu().solve(-F);

    double t = 1.0;
    bool accepted = false;
    while (t >= kMinStep) {
      const VectorXd u_try = u + t * delta.head(m);
      if (u_try.lpNorm<Eigen::Infinity>() <= kBound) {
        const VectorXd w_try = w + t * delta.tail(m);
        VectorXd F_try = residual_vector(D, terms, p, u_try, w_try);
        const double f_try = F_try.lpNorm<Eigen::Infinity>();
        if (f_try < fnorm) {
          u = u_try;
          w = w_try;
          F = std::move(F_try);
          fnorm = f_try;
          accepted = true;
          break;
        }
      }
      t *= 0.5;
    }
    if (!accepted) break;
  }
  if (!(fnorm <= kTol)) {
    std::ostringstream os;
    os << "dense oracle: Newton stalled at residual " << fnorm << " after " << it << " iterations";
    throw ConvergenceError(os.str());
  }
  return {as_field(g, u), as_field(g, w), fnorm, it};
}

ScalarField dense_scheme_solve(const ScalarField& u_n, const ScalarField* u_nm1, const SchemeParams& scheme,
                               const PotentialParams& p) {
  return dense_scheme_solve_detailed(u_n, u_nm1, scheme, p).u;
}

ScalarField restrict_field(const ScalarField& fine) {
  const Grid& gf = fine.grid();
  if (gf.n() % 2 != 0) throw DomainError("restrict_field: fine resolution must be even");
  const Grid gc(gf.dim(), gf.n() / 2, gf.length());
  ScalarField coarse(gc);
  const int nc = gc.n();
  const int nzc = gc.dim() == 3 ? nc : 1;
  const int dz = gc.dim() == 3 ? 2 : 1;
  const double w = 1.0 / (gc.dim() == 3 ? 8.0 : 4.0);
  for (int k = 0; k < nzc; ++k)
    for (int j = 0; j < nc; ++j)
      for (int i = 0; i < nc; ++i) {
        double acc = 0.0;
        for (int c = 0; c < dz; ++c)
          for (int b = 0; b < 2; ++b)
            for (int a = 0; a < 2; ++a) acc += fine.at(2 * i + a, 2 * j + b, dz * k + c);
        coarse.at(i, j, k) = w * acc;
      }
  return coarse;
}

double TauPowerLaw::at(double tau) const { return exponent == 0.0 ? coefficient : coefficient * std::pow(tau, exponent); }

double refinement_tau(const ConvergenceConfig& c, double h) {
  return c.refinement == Refinement::Quadratic ? c.tau_coeff * h * h : c.tau_coeff * h;
}

ConvergenceResult convergence_study(const ConvergenceConfig& config) {
  if (config.ladder.size() < 2) throw ConfigError("need at least two resolutions", "convergence.ladder");
  for (std::size_t i = 1; i < config.ladder.size(); ++i)
    if (config.ladder[i] != 2 * config.ladder[i - 1])
      throw ConfigError("each resolution must double the previous one", "convergence.ladder");
  if (!config.initial) throw ConfigError("no initial condition", "initial.preset");
  if (config.order != 1 && config.order != 2) throw ConfigError("order must be 1 or 2", "scheme.order");

  ConvergenceResult result;
  for (int n : config.ladder) {
    const Grid g(config.dim, n, config.length);
    StepContext ctx;
    ctx.potential = config.potential;
    ctx.scheme.order = config.order;
    ctx.scheme.tau = refinement_tau(config, g.h());
    ctx.scheme.a_stab = config.a_stab;
    ctx.admm = config.admm;
    ctx.admm.rho_u = config.rho_u.at(ctx.scheme.tau);
    ctx.admm.rho_w = config.rho_w.at(ctx.scheme.tau);
    ctx.snapshot_count = 0;
    const Stepper stepper(g, ctx);
    const int total = Stepper::step_count(config.t_final, ctx.scheme.tau);
    ScalarField last = config.initial(g);
    StepObserver obs = [&](const StepReport& r, const ScalarField& u) {
      result.min_bound_margin = std::min(result.min_bound_margin, r.iterate_margin);
      if (r.step_index == total) last = u;
      if (config.progress) config.progress(n, r.step_index, total);
    };
    stepper.run(config.initial(g), config.t_final, obs);
    result.finals.push_back(std::move(last));
  }

  double prev_delta = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 1; i < config.ladder.size(); ++i) {
    const ScalarField& coarse = result.finals[i - 1];
    const ScalarField& fine = result.finals[i];
    ConvergenceRow row;
    row.n_coarse = config.ladder[i - 1];
    row.n_fine = config.ladder[i];
    row.h_coarse = coarse.grid().h();
    row.h_fine = fine.grid().h();
    row.delta_l2 = distance_l2(restrict_field(fine), coarse);
    row.rate = std::log2(prev_delta / row.delta_l2);
    prev_delta = row.delta_l2;
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace fhadmm

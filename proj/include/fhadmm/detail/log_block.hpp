#pragma once

// Per-cell pieces of the logarithmic block, shared by the standalone
// subproblem kernel, the fused ADMM sweep and the serial reference.

#include <cmath>
#include <limits>

namespace fhadmm::detail {

struct LogRoot {
  double v;
  double residual;
  bool converged;
};

/// Safeguarded Newton for c_log log((1+v)/(1-v)) + a v = b on (-1, 1).
/// No argument checking; see scalar_log_root for the checked entry point.
inline LogRoot log_root(double a, double b, double c_log, double v_init, double tol, int max_iter) {
  const double two_c = 2.0 * c_log;
  // One log instead of atanh: 1 - v is exact near v = 1 and the absolute
  // error near v = 0 is a few ulps.
  auto residual = [&](double v) { return c_log * std::log((1.0 + v) / (1.0 - v)) + a * v - b; };

  // The residual increases strictly and spans the reals, so (-1, 1) brackets
  // the root from the start. Bisecting toward an open end reproduces the
  // expansion v -> (1 + v) / 2.
  double lo = -1.0, hi = 1.0;
  double v = v_init;
  double fv = residual(v);
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(fv) <= tol) return {v, fv, true};
    (fv < 0.0 ? lo : hi) = v;

    const double dfdv = two_c / ((1.0 - v) * (1.0 + v)) + a;
    double cand = v - fv / dfdv;
    double fc = 0.0;
    bool newton = cand > lo && cand < hi;
    if (newton) {
      // Step below double resolution: v is the root to working precision.
      if (cand == v) return {v, fv, true};
      if (std::abs(cand - v) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(v)) {
        const double nb = std::nextafter(v, cand);
        const double fn = residual(nb);
        if (fn == 0.0 || (fn < 0.0) != (fv < 0.0))
          return std::abs(fn) < std::abs(fv) ? LogRoot{nb, fn, true} : LogRoot{v, fv, true};
      }
      fc = residual(cand);
      newton = std::abs(fc) < std::abs(fv);
    }
    if (!newton) {
      cand = 0.5 * (lo + hi);
      if (cand == lo || cand == hi) {
        // lo, hi adjacent doubles; only interior points are admissible.
        if (lo == -1.0) return {hi, residual(hi), true};
        if (hi == 1.0) return {lo, residual(lo), true};
        const double flo = residual(lo), fhi = residual(hi);
        return std::abs(flo) <= std::abs(fhi) ? LogRoot{lo, flo, true} : LogRoot{hi, fhi, true};
      }
      fc = residual(cand);
    }
    v = cand;
    fv = fc;
  }
  return {v, fv, std::abs(fv) <= tol};
}

/// Coefficients of the logarithmic block after eliminating w2:
///   c_log log((1+u2)/(1-u2)) + a u2 = b,  a = rho_u + (1-alpha)^2 / rho_w
///   b = c_lin E + (1-alpha) w1 + (1-alpha) w3 / rho_w + (1-alpha)^2 M / rho_w + u3 + rho_u u1
///   w2 = w1 + (w3 + (1-alpha)(M - u2)) / rho_w
/// with E the explicit level and M the mass reference.
struct LogBlock {
  double beta;  // 1 - alpha
  double inv_rho_w;
  double rho_u;
  double a;
  double c_lin;
  double c_log;
  double tol;
  int max_iter;

  LogBlock(double alpha, double rho_u_, double rho_w, double c_lin_, double c_log_, double tol_, int max_iter_)
      : beta(1.0 - alpha), inv_rho_w(1.0 / rho_w), rho_u(rho_u_), a(rho_u_ + beta * beta / rho_w), c_lin(c_lin_),
        c_log(c_log_), tol(tol_), max_iter(max_iter_) {}

  double rhs(double u1, double w1, double u3, double w3, double e, double m) const {
    return c_lin * e + beta * w1 + beta * w3 * inv_rho_w + beta * beta * m * inv_rho_w + u3 + rho_u * u1;
  }
  double w2(double u2, double w1, double w3, double m) const { return w1 + (w3 + beta * (m - u2)) * inv_rho_w; }
};

}  // namespace fhadmm::detail

#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

#include "fhadmm/grid.hpp"

namespace fhadmm {

class FourierTransform;

/// Eigenvalues of -Delta_h under periodicity:
/// lambda[k] = (4/h^2) sum_d sin^2(pi k_d / N), indexed like a ScalarField.
struct LaplacianSymbol {
  Grid grid;
  std::vector<double> lambda;
  /// (4/h^2) sin^2(pi k / N) for k = 0..N-1; lambda is the axis sum.
  std::vector<double> axis;
  std::shared_ptr<const FourierTransform> transform;
};

/// Real-to-complex DFT on the half spectrum (x axis halved to N/2 + 1 modes).
/// Forward is unnormalized; inverse carries the 1/N^dim factor, so
/// inverse(forward(f)) == f up to roundoff. Plans are immutable once built
/// and the execute calls are safe from several threads.
class FourierTransform {
public:
  using Spectrum = std::vector<std::complex<double>>;

  explicit FourierTransform(const Grid& g);
  ~FourierTransform();
  FourierTransform(const FourierTransform&) = delete;
  FourierTransform& operator=(const FourierTransform&) = delete;

  const Grid& grid() const noexcept { return grid_; }
  std::size_t spectrum_size() const noexcept { return spectrum_size_; }
  int half_n() const noexcept { return grid_.n() / 2 + 1; }

  Spectrum forward(const ScalarField& f) const;
  ScalarField inverse(const Spectrum& s) const;

  /// Raw unnormalized transforms on buffers from FFTW's allocator (the plans
  /// require its alignment). inverse_raw overwrites its input.
  void forward_raw(double* in, std::complex<double>* out) const;
  void inverse_raw(std::complex<double>* in, double* out) const;

  /// lambda at half-spectrum position (kx, ky, kz).
  static double mode_lambda(const LaplacianSymbol& sym, int kx, int ky, int kz) {
    return sym.axis[kx] + sym.axis[ky] + sym.axis[kz];
  }

private:
  struct Plans;
  Grid grid_;
  std::size_t spectrum_size_;
  std::unique_ptr<Plans> plans_;
};

LaplacianSymbol build_symbol(const Grid& g);

struct LinearRhs {
  ScalarField r_u;
  ScalarField r_w;
};

struct LinearSolution {
  ScalarField u1;
  ScalarField w1;
};

/// Solves, mode by mode,
///   (eps2 Lambda + rho_u) u - alpha w = r_u
///   -alpha u - (tau Lambda + rho_w) w = r_w
/// i.e. -eps2 Delta u + rho_u u - alpha w = r_u,  -alpha u + tau Delta w - rho_w w = r_w.
LinearSolution solve_first_order_linear(const LinearRhs& rhs, const LaplacianSymbol& sym, double eps2, double tau,
                                        double alpha, double rho_u, double rho_w);

/// As above with u-coefficient (eps2 + a_stab tau c_lin^2) and w-coefficient
/// 2 tau / 3. The explicit A tau c_lin^2 Delta u^n term belongs in r_u.
LinearSolution solve_second_order_linear(const LinearRhs& rhs, const LaplacianSymbol& sym, double eps2, double tau,
                                         double a_stab, double c_lin, double alpha, double rho_u, double rho_w);

/// Determinant of the 2x2 mode system below at eigenvalue lambda,
/// -(u_lap lambda + rho_u)(w_lap lambda + rho_w) - alpha^2, which never exceeds
/// -(rho_u rho_w + alpha^2).
double mode_determinant(double lambda, double u_lap, double w_lap, double alpha, double rho_u, double rho_w);

/// Workspace for repeated solves of one coupled constant-coefficient system
///   (u_lap Lambda + rho_u) u - alpha w = r_u,  -alpha u - (w_lap Lambda + rho_w) w = r_w.
/// Fill u() and w() with the right-hand sides, call solve(), and the same
/// buffers hold the solution. Per-mode 2x2 inverses are precomputed.
class CoupledModeSolver {
public:
  CoupledModeSolver(const LaplacianSymbol& sym, double u_lap, double w_lap, double alpha, double rho_u, double rho_w);
  ~CoupledModeSolver();
  CoupledModeSolver(CoupledModeSolver&&) noexcept;
  CoupledModeSolver& operator=(CoupledModeSolver&&) noexcept;

  std::span<double> u() noexcept;
  std::span<double> w() noexcept;
  void solve();

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// Generic constant-coefficient form:
///   (u_lap Lambda + rho_u) u - alpha w = r_u,  -alpha u - (w_lap Lambda + rho_w) w = r_w.
LinearSolution solve_coupled_modes(const LinearRhs& rhs, const LaplacianSymbol& sym, double u_lap, double w_lap,
                                   double alpha, double rho_u, double rho_w);

}  // namespace fhadmm

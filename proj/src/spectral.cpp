#include "fhadmm/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "fhadmm/errors.hpp"

namespace fhadmm {

namespace {

// The FFTW planner is not reentrant.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};
template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

template <class T>
FftwBuffer<T> fftw_alloc(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * n));
  if (!p) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

void check_params(double alpha, double rho_u, double rho_w) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)", "admm.alpha");
  if (!(rho_u > 0.0) || !std::isfinite(rho_u)) throw ConfigError("rho_u must be positive", "admm.rho_u");
  if (!(rho_w > 0.0) || !std::isfinite(rho_w)) throw ConfigError("rho_w must be positive", "admm.rho_w");
}

}  // namespace

struct FourierTransform::Plans {
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
  }
};

FourierTransform::FourierTransform(const Grid& g) : grid_(g), plans_(std::make_unique<Plans>()) {
  const int n = g.n();
  spectrum_size_ = static_cast<std::size_t>(n / 2 + 1) * n * (g.dim() == 3 ? n : 1);
  // FFTW takes the slowest axis first; all extents are N so only the rank matters.
  const int dims[3] = {n, n, n};
  auto real = fftw_alloc<double>(g.size());
  auto cplx = fftw_alloc<fftw_complex>(spectrum_size_);
  std::lock_guard lock(planner_mutex());
  plans_->r2c = fftw_plan_dft_r2c(g.dim(), dims, real.get(), cplx.get(), FFTW_ESTIMATE);
  plans_->c2r = fftw_plan_dft_c2r(g.dim(), dims, cplx.get(), real.get(), FFTW_ESTIMATE);
  if (!plans_->r2c || !plans_->c2r) throw std::runtime_error("FFTW planning failed");
}

FourierTransform::~FourierTransform() = default;

FourierTransform::Spectrum FourierTransform::forward(const ScalarField& f) const {
  require_same_grid(grid_, f.grid());
  auto real = fftw_alloc<double>(grid_.size());
  auto cplx = fftw_alloc<fftw_complex>(spectrum_size_);
  std::copy(f.values().begin(), f.values().end(), real.get());
  fftw_execute_dft_r2c(plans_->r2c, real.get(), cplx.get());
  Spectrum out(spectrum_size_);
  for (std::size_t i = 0; i < spectrum_size_; ++i) out[i] = {cplx[i][0], cplx[i][1]};
  return out;
}

ScalarField FourierTransform::inverse(const Spectrum& s) const {
  if (s.size() != spectrum_size_) throw DomainError("spectrum size does not match transform");
  auto real = fftw_alloc<double>(grid_.size());
  auto cplx = fftw_alloc<fftw_complex>(spectrum_size_);
  for (std::size_t i = 0; i < spectrum_size_; ++i) {
    cplx[i][0] = s[i].real();
    cplx[i][1] = s[i].imag();
  }
  fftw_execute_dft_c2r(plans_->c2r, cplx.get(), real.get());
  ScalarField out(grid_);
  const double scale = 1.0 / static_cast<double>(grid_.size());
  for (std::size_t i = 0; i < grid_.size(); ++i) out[i] = real[i] * scale;
  return out;
}

void FourierTransform::forward_raw(double* in, std::complex<double>* out) const {
  fftw_execute_dft_r2c(plans_->r2c, in, reinterpret_cast<fftw_complex*>(out));
}

void FourierTransform::inverse_raw(std::complex<double>* in, double* out) const {
  fftw_execute_dft_c2r(plans_->c2r, reinterpret_cast<fftw_complex*>(in), out);
}

double mode_determinant(double lambda, double u_lap, double w_lap, double alpha, double rho_u, double rho_w) {
  return -(u_lap * lambda + rho_u) * (w_lap * lambda + rho_w) - alpha * alpha;
}

LaplacianSymbol build_symbol(const Grid& g) {
  LaplacianSymbol sym{g, std::vector<double>(g.size()), std::vector<double>(g.n()), nullptr};
  const int n = g.n();
  const double c = 4.0 / (g.h() * g.h());
  for (int k = 0; k < n; ++k) {
    const double s = std::sin(std::numbers::pi * k / n);
    sym.axis[k] = c * s * s;
  }
  const int nz = g.dim() == 3 ? n : 1;
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        sym.lambda[g.index(i, j, k)] = sym.axis[i] + sym.axis[j] + (g.dim() == 3 ? sym.axis[k] : 0.0);
  sym.transform = std::make_shared<const FourierTransform>(g);
  return sym;
}

struct CoupledModeSolver::Impl {
  const LaplacianSymbol* sym;
  FftwBuffer<double> ru, rw;
  FftwBuffer<fftw_complex> su, sw;
  // Rows of the scaled inverse: u = m_uu fu + m_uw fw, w = m_uw fu + m_ww fw.
  std::vector<double> m_uu, m_uw, m_ww;
};

CoupledModeSolver::CoupledModeSolver(const LaplacianSymbol& sym, double u_lap, double w_lap, double alpha,
                                     double rho_u, double rho_w)
    : impl_(std::make_unique<Impl>()) {
  check_params(alpha, rho_u, rho_w);
  const Grid& g = sym.grid;
  const FourierTransform& ft = *sym.transform;
  Impl& m = *impl_;
  m.sym = &sym;
  m.ru = fftw_alloc<double>(g.size());
  m.rw = fftw_alloc<double>(g.size());
  m.su = fftw_alloc<fftw_complex>(ft.spectrum_size());
  m.sw = fftw_alloc<fftw_complex>(ft.spectrum_size());
  std::fill_n(m.ru.get(), g.size(), 0.0);
  std::fill_n(m.rw.get(), g.size(), 0.0);
  m.m_uu.resize(ft.spectrum_size());
  m.m_uw.resize(ft.spectrum_size());
  m.m_ww.resize(ft.spectrum_size());

  const int n = g.n();
  const int hn = ft.half_n();
  const int nz = g.dim() == 3 ? n : 1;
  const double scale = 1.0 / static_cast<double>(g.size());
  for (int kz = 0; kz < nz; ++kz)
    for (int ky = 0; ky < n; ++ky)
      for (int kx = 0; kx < hn; ++kx) {
        const std::size_t q = kx + static_cast<std::size_t>(hn) * (ky + static_cast<std::size_t>(n) * kz);
        // In 2D the z term is axis[0] == 0.
        const double lam = FourierTransform::mode_lambda(sym, kx, ky, kz);
        const double a = u_lap * lam + rho_u;
        const double b = w_lap * lam + rho_w;
        const double inv_det = scale / mode_determinant(lam, u_lap, w_lap, alpha, rho_u, rho_w);
        m.m_uu[q] = -b * inv_det;
        m.m_uw[q] = alpha * inv_det;
        m.m_ww[q] = a * inv_det;
      }
}

CoupledModeSolver::~CoupledModeSolver() = default;
CoupledModeSolver::CoupledModeSolver(CoupledModeSolver&&) noexcept = default;
CoupledModeSolver& CoupledModeSolver::operator=(CoupledModeSolver&&) noexcept = default;

std::span<double> CoupledModeSolver::u() noexcept { return {impl_->ru.get(), impl_->sym->grid.size()}; }
std::span<double> CoupledModeSolver::w() noexcept { return {impl_->rw.get(), impl_->sym->grid.size()}; }

void CoupledModeSolver::solve() {
  Impl& m = *impl_;
  const FourierTransform& ft = *m.sym->transform;
  auto* su = reinterpret_cast<std::complex<double>*>(m.su.get());
  auto* sw = reinterpret_cast<std::complex<double>*>(m.sw.get());
  ft.forward_raw(m.ru.get(), su);
  ft.forward_raw(m.rw.get(), sw);
  const std::ptrdiff_t ns = static_cast<std::ptrdiff_t>(ft.spectrum_size());
  const double* muu = m.m_uu.data();
  const double* muw = m.m_uw.data();
  const double* mww = m.m_ww.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t q = 0; q < ns; ++q) {
    const std::complex<double> fu = su[q], fw = sw[q];
    su[q] = muu[q] * fu + muw[q] * fw;
    sw[q] = muw[q] * fu + mww[q] * fw;
  }
  ft.inverse_raw(su, m.ru.get());
  ft.inverse_raw(sw, m.rw.get());
}

LinearSolution solve_coupled_modes(const LinearRhs& rhs, const LaplacianSymbol& sym, double u_lap, double w_lap,
                                   double alpha, double rho_u, double rho_w) {
  require_same_grid(rhs.r_u.grid(), sym.grid);
  require_same_grid(rhs.r_w.grid(), sym.grid);
  CoupledModeSolver solver(sym, u_lap, w_lap, alpha, rho_u, rho_w);
  std::copy(rhs.r_u.values().begin(), rhs.r_u.values().end(), solver.u().begin());
  std::copy(rhs.r_w.values().begin(), rhs.r_w.values().end(), solver.w().begin());
  solver.solve();
  return {ScalarField(sym.grid, std::vector<double>(solver.u().begin(), solver.u().end())),
          ScalarField(sym.grid, std::vector<double>(solver.w().begin(), solver.w().end()))};
}

LinearSolution solve_first_order_linear(const LinearRhs& rhs, const LaplacianSymbol& sym, double eps2, double tau,
                                        double alpha, double rho_u, double rho_w) {
  if (!(eps2 > 0.0)) throw ConfigError("eps must be positive", "potential.eps");
  if (!(tau > 0.0)) throw ConfigError("time step must be positive", "scheme.tau");
  return solve_coupled_modes(rhs, sym, eps2, tau, alpha, rho_u, rho_w);
}

LinearSolution solve_second_order_linear(const LinearRhs& rhs, const LaplacianSymbol& sym, double eps2, double tau,
                                         double a_stab, double c_lin, double alpha, double rho_u, double rho_w) {
  if (!(eps2 > 0.0)) throw ConfigError("eps must be positive", "potential.eps");
  if (!(tau > 0.0)) throw ConfigError("time step must be positive", "scheme.tau");
  if (!(a_stab >= 0.0)) throw ConfigError("stabilization must be non-negative", "scheme.a_stab");
  return solve_coupled_modes(rhs, sym, eps2 + a_stab * tau * c_lin * c_lin, 2.0 * tau / 3.0, alpha, rho_u, rho_w);
}

}  // namespace fhadmm

#include "fhadmm/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fhadmm/errors.hpp"

namespace fhadmm {

Grid::Grid(int dim, int n, double length) : dim_(dim), n_(n), length_(length) {
  if (dim != 2 && dim != 3) throw ConfigError("dimension must be 2 or 3", "grid.dim");
  if (n < 2) throw ConfigError("need at least 2 cells per axis", "grid.n");
  if (!(length > 0.0) || !std::isfinite(length)) throw ConfigError("domain length must be positive", "grid.length");
  h_ = length / n;
  cell_volume_ = dim == 2 ? h_ * h_ : h_ * h_ * h_;
  size_ = static_cast<std::size_t>(n) * n * (dim == 3 ? n : 1);
}

double Grid::volume() const noexcept { return dim_ == 2 ? length_ * length_ : length_ * length_ * length_; }

void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) {
    std::ostringstream os;
    os << "grid mismatch: (dim " << a.dim() << ", N " << a.n() << ", L " << a.length() << ") vs (dim " << b.dim()
       << ", N " << b.n() << ", L " << b.length() << ")";
    throw DomainError(os.str());
  }
}

ScalarField::ScalarField(const Grid& g, std::vector<double> values) : grid_(g), values_(std::move(values)) {
  if (values_.size() != g.size()) throw DomainError("field value count does not match grid size");
}

ScalarField& ScalarField::operator+=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(values_.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) values_[i] += o.values_[i];
  return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& o) {
  require_same_grid(grid_, o.grid_);
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(values_.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) values_[i] -= o.values_[i];
  return *this;
}

ScalarField& ScalarField::operator*=(double s) {
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(values_.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) values_[i] *= s;
  return *this;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

VectorField::VectorField(const Grid& g) : grid_(g) {
  for (int d = 0; d < g.dim(); ++d) components_[d].assign(g.size(), 0.0);
}

namespace {

// Flat-index strides of the three axes; nz = 1 in 2D.
struct Layout {
  int n;
  int nz;
  std::ptrdiff_t stride[3];
};

Layout layout(const Grid& g) {
  const std::ptrdiff_t n = g.n();
  return {g.n(), g.dim() == 3 ? g.n() : 1, {1, n, n * n}};
}

inline int wrap_up(int i, int n) { return i + 1 == n ? 0 : i + 1; }
inline int wrap_down(int i, int n) { return i == 0 ? n - 1 : i - 1; }

}  // namespace

VectorField gradient(const ScalarField& f) {
  const Grid& g = f.grid();
  VectorField out(g);
  const Layout L = layout(g);
  const double inv_h = 1.0 / g.h();
  const double* src = f.data();
  const int n = L.n;
  const int dim = g.dim();
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < L.nz; ++k) {
    for (int j = 0; j < n; ++j) {
      const int jp = wrap_up(j, n);
      const int kp = wrap_up(k, L.nz);
      for (int i = 0; i < n; ++i) {
        const std::size_t c = g.index(i, j, k);
        out.component(0)[c] = (src[g.index(wrap_up(i, n), j, k)] - src[c]) * inv_h;
        out.component(1)[c] = (src[g.index(i, jp, k)] - src[c]) * inv_h;
        if (dim == 3) out.component(2)[c] = (src[g.index(i, j, kp)] - src[c]) * inv_h;
      }
    }
  }
  return out;
}

ScalarField divergence(const VectorField& v) {
  const Grid& g = v.grid();
  ScalarField out(g);
  const Layout L = layout(g);
  const double inv_h = 1.0 / g.h();
  const int n = L.n;
  const int dim = g.dim();
  const double* vx = v.component(0).data();
  const double* vy = v.component(1).data();
  const double* vz = dim == 3 ? v.component(2).data() : nullptr;
  double* dst = out.data();
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < L.nz; ++k) {
    for (int j = 0; j < n; ++j) {
      const int jm = wrap_down(j, n);
      const int km = wrap_down(k, L.nz);
      for (int i = 0; i < n; ++i) {
        const std::size_t c = g.index(i, j, k);
        double acc = (vx[c] - vx[g.index(wrap_down(i, n), j, k)]) * inv_h;
        acc += (vy[c] - vy[g.index(i, jm, k)]) * inv_h;
        if (dim == 3) acc += (vz[c] - vz[g.index(i, j, km)]) * inv_h;
        dst[c] = acc;
      }
    }
  }
  return out;
}

// Evaluated in the same floating-point order as divergence(gradient(f)) so the
// two agree exactly.
ScalarField laplacian(const ScalarField& f) {
  const Grid& g = f.grid();
  ScalarField out(g);
  const Layout L = layout(g);
  const double inv_h = 1.0 / g.h();
  const int n = L.n;
  const int dim = g.dim();
  const double* s = f.data();
  double* dst = out.data();
#pragma omp parallel for collapse(2) schedule(static)
  for (int k = 0; k < L.nz; ++k) {
    for (int j = 0; j < n; ++j) {
      const int jp = wrap_up(j, n), jm = wrap_down(j, n);
      const int kp = wrap_up(k, L.nz), km = wrap_down(k, L.nz);
      for (int i = 0; i < n; ++i) {
        const int ip = wrap_up(i, n), im = wrap_down(i, n);
        const std::size_t c = g.index(i, j, k);
        const double fc = s[c];
        double acc = ((s[g.index(ip, j, k)] - fc) * inv_h - (fc - s[g.index(im, j, k)]) * inv_h) * inv_h;
        acc += ((s[g.index(i, jp, k)] - fc) * inv_h - (fc - s[g.index(i, jm, k)]) * inv_h) * inv_h;
        if (dim == 3) acc += ((s[g.index(i, j, kp)] - fc) * inv_h - (fc - s[g.index(i, j, km)]) * inv_h) * inv_h;
        dst[c] = acc;
      }
    }
  }
  return out;
}

namespace {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  const std::ptrdiff_t m = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for reduction(+ : acc) schedule(static)
  for (std::ptrdiff_t i = 0; i < m; ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

double inner(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  return a.grid().cell_volume() * dot(a.data(), b.data(), a.size());
}

double inner(const VectorField& a, const VectorField& b) {
  require_same_grid(a.grid(), b.grid());
  double acc = 0.0;
  for (int d = 0; d < a.dim(); ++d) acc += dot(a.component(d).data(), b.component(d).data(), a.grid().size());
  return a.grid().cell_volume() * acc;
}

Norms norms(const ScalarField& f) {
  double sq = 0.0, abs_sum = 0.0, mx = 0.0;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size());
  const double* v = f.data();
#pragma omp parallel for reduction(+ : sq, abs_sum) reduction(max : mx) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double a = std::abs(v[i]);
    sq += a * a;
    abs_sum += a;
    mx = std::max(mx, a);
  }
  const double w = f.grid().cell_volume();
  return {std::sqrt(w * sq), w * abs_sum, mx};
}

double norm_l2(const ScalarField& f) { return std::sqrt(inner(f, f)); }

double distance_l2(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  double sq = 0.0;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(a.size());
  const double* x = a.data();
  const double* y = b.data();
#pragma omp parallel for reduction(+ : sq) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double d = x[i] - y[i];
    sq += d * d;
  }
  return std::sqrt(a.grid().cell_volume() * sq);
}

double mass(const ScalarField& f) {
  double acc = 0.0;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(f.size());
  const double* v = f.data();
#pragma omp parallel for reduction(+ : acc) schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) acc += v[i];
  return f.grid().cell_volume() * acc;
}

double max_value(const ScalarField& f) { return *std::max_element(f.values().begin(), f.values().end()); }
double min_value(const ScalarField& f) { return *std::min_element(f.values().begin(), f.values().end()); }

}  // namespace fhadmm

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace fhadmm {

/// Uniform periodic cell-centered mesh on (0, L)^dim with N cells per axis.
///
/// Cell (i, j[, k]) is centered at ((i + 1/2) h, (j + 1/2) h[, (k + 1/2) h]) with
/// zero-based indices. Storage is row-major with x fastest:
/// flat = i + N * (j + N * k).
class Grid {
public:
  Grid(int dim, int n, double length);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  double h() const noexcept { return h_; }
  std::size_t size() const noexcept { return size_; }
  /// h^dim, the weight of every cell in the grid inner products.
  double cell_volume() const noexcept { return cell_volume_; }
  double volume() const noexcept;

  std::size_t index(int i, int j, int k = 0) const noexcept {
    return static_cast<std::size_t>(i) +
           static_cast<std::size_t>(n_) * (static_cast<std::size_t>(j) + static_cast<std::size_t>(n_) * k);
  }
  /// Cell-center coordinate along one axis.
  double center(int i) const noexcept { return (i + 0.5) * h_; }

  bool operator==(const Grid& o) const noexcept {
    return dim_ == o.dim_ && n_ == o.n_ && length_ == o.length_;
  }

private:
  int dim_;
  int n_;
  double length_;
  double h_;
  double cell_volume_;
  std::size_t size_;
};

/// Member of the cell-centered periodic space: one period of values.
class ScalarField {
public:
  explicit ScalarField(const Grid& g, double value = 0.0) : grid_(g), values_(g.size(), value) {}
  ScalarField(const Grid& g, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }
  double& at(int i, int j, int k = 0) noexcept { return values_[grid_.index(i, j, k)]; }
  double at(int i, int j, int k = 0) const noexcept { return values_[grid_.index(i, j, k)]; }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double* data() noexcept { return values_.data(); }
  const double* data() const noexcept { return values_.data(); }

  ScalarField& operator+=(const ScalarField& o);
  ScalarField& operator-=(const ScalarField& o);
  ScalarField& operator*=(double s);

private:
  Grid grid_;
  std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Face-centered vector field. Component d holds the value on face i+1/2
/// along axis d at the index of cell i.
class VectorField {
public:
  explicit VectorField(const Grid& g);

  const Grid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return grid_.dim(); }
  std::vector<double>& component(int d) noexcept { return components_[d]; }
  const std::vector<double>& component(int d) const noexcept { return components_[d]; }

private:
  Grid grid_;
  std::array<std::vector<double>, 3> components_;
};

struct Norms {
  double l2 = 0.0;
  double l1 = 0.0;
  double linf = 0.0;
};

// OpenMP kernels. Serial counterparts live in fhadmm::reference.

VectorField gradient(const ScalarField& f);
ScalarField divergence(const VectorField& v);
/// 2*dim+1-point periodic stencil; agrees with divergence(gradient(f)).
ScalarField laplacian(const ScalarField& f);

double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);
Norms norms(const ScalarField& f);
double norm_l2(const ScalarField& f);
/// l2 norm of a - b without materializing the difference.
double distance_l2(const ScalarField& a, const ScalarField& b);
/// Total mass <u, 1>.
double mass(const ScalarField& f);
double max_value(const ScalarField& f);
double min_value(const ScalarField& f);

void require_same_grid(const Grid& a, const Grid& b);

}  // namespace fhadmm

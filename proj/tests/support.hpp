#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "fhadmm/grid.hpp"

namespace fhadmm::test {

inline ScalarField random_field(const Grid& g, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  ScalarField f(g);
  for (double& v : f.values()) v = dist(rng);
  return f;
}

inline VectorField random_vector_field(const Grid& g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  VectorField v(g);
  for (int d = 0; d < g.dim(); ++d)
    for (double& x : v.component(d)) x = dist(rng);
  return v;
}

/// Mean plus a few low Fourier modes with random amplitudes, scaled so the
/// values stay inside [mean - amp, mean + amp].
inline ScalarField smooth_random_field(const Grid& g, std::uint64_t seed, double mean, double amp) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField f(g);
  const int nz = g.dim() == 3 ? g.n() : 1;
  const double k0 = 2.0 * std::numbers::pi / g.length();
  for (int m = 0; m < 4; ++m) {
    const double a = dist(rng), px = dist(rng) * 3.0, py = dist(rng) * 3.0, pz = dist(rng) * 3.0;
    const int mx = m % 2 + 1, my = m / 2 + (m == 0 ? 1 : 0), mz = g.dim() == 3 ? 1 : 0;
    for (int k = 0; k < nz; ++k)
      for (int j = 0; j < g.n(); ++j)
        for (int i = 0; i < g.n(); ++i)
          f.at(i, j, k) += a * std::cos(k0 * mx * g.center(i) + px) * std::cos(k0 * my * g.center(j) + py) *
                           std::cos(k0 * mz * g.center(k) + pz);
  }
  double peak = 0.0;
  for (double v : f.values()) peak = std::max(peak, std::abs(v));
  for (double& v : f.values()) v = mean + amp * v / peak;
  return f;
}

inline double max_abs_diff(const ScalarField& a, const ScalarField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace fhadmm::test

namespace fhadmm::test {

/// Inputs shared with tests/oracles/scheme_oracle.py (N = 4, L = 1).
inline ScalarField oracle_u_n(const Grid& g) {
  ScalarField f(g);
  const double k = 2.0 * std::numbers::pi;
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i) {
      const double x = g.center(i), y = g.center(j);
      f.at(i, j) = 0.1 + 0.5 * std::sin(k * x) * std::cos(k * y) + 0.2 * std::cos(k * x);
    }
  return f;
}

inline ScalarField oracle_u_nm1(const Grid& g) {
  ScalarField f(g);
  const double k = 2.0 * std::numbers::pi;
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i) {
      const double x = g.center(i), y = g.center(j);
      f.at(i, j) = 0.1 + 0.45 * std::sin(k * x) * std::cos(k * y) + 0.25 * std::cos(k * x);
    }
  return f;
}

}  // namespace fhadmm::test

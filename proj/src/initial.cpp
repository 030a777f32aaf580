#include "fhadmm/initial.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace fhadmm {

ScalarField cosine_product(const Grid& g) {
  ScalarField u(g);
  const int n = g.n();
  const int nz = g.dim() == 3 ? n : 1;
  const double k = 4.0 * std::numbers::pi / g.length();
  auto bump = [&](int i) { return 0.5 * (1.0 - std::cos(k * g.center(i))); };
  for (int kk = 0; kk < nz; ++kk)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        double v = 1.8 * bump(i) * bump(j);
        if (g.dim() == 3) v *= bump(kk);
        u.at(i, j, kk) = v - 0.9;
      }
  return u;
}

ScalarField random_uniform(const Grid& g, double offset, double low, double high, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  ScalarField u(g);
  const double width = high - low;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    u[i] = offset + low + width * unit;
  }
  return u;
}

ScalarField constant_field(const Grid& g, double value) { return ScalarField(g, value); }

}  // namespace fhadmm

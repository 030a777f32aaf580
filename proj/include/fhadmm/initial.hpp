#pragma once

#include <cstdint>

#include "fhadmm/grid.hpp"

namespace fhadmm {

/// 1.8 * prod_d (1 - cos(4 pi x_d / L)) / 2 - 0.9 at cell centers.
ScalarField cosine_product(const Grid& g);

/// offset + U[low, high) per cell, drawn from a seeded mt19937_64 in flat
/// index order (x fastest). Uniforms use the top 53 bits of each draw so the
/// sequence does not depend on the standard library's distributions.
ScalarField random_uniform(const Grid& g, double offset, double low, double high, std::uint64_t seed);

ScalarField constant_field(const Grid& g, double value);

}  // namespace fhadmm

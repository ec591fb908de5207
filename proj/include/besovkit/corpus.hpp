#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "besovkit/grid.hpp"

namespace bk {

struct NamedFunction {
  std::string name;
  GridFunction fn;
};

// Seeded test corpus: Gaussians at varied widths/centers, modulated bumps,
// random band-limited fields, vector-valued variants with random unit
// directions, near-boundary support, single lattice modes. Every entry is
// spectrally truncated so it is exactly band-limited inside the dyadic range;
// freq_cap > 0 lowers the truncation (e.g. to compare grids of different
// size over the same function set).
std::vector<NamedFunction> make_corpus(const Grid& grid, const ValueSpace& space,
                                       std::uint64_t seed, int count = 20,
                                       double freq_cap = -1.0);

// Random fields with spectrum supported exactly in {|xi| <= radius}.
std::vector<NamedFunction> make_band_limited_family(const Grid& grid, const ValueSpace& space,
                                                    double radius, std::uint64_t seed, int count);

GridFunction gaussian_bump(const Grid& grid, const ValueSpace& space, double width,
                           std::array<double, 2> center, double modulation = 0.0);

// Zero all spectral coefficients with |xi| > radius.
GridFunction band_truncate(const GridFunction& f, double radius);

// Subset of the corpus suitable for decomposition round-trips (smooth bumps).
std::vector<NamedFunction> smooth_bump_corpus(const Grid& grid, const ValueSpace& space,
                                              std::uint64_t seed, int count = 6);

} // namespace bk

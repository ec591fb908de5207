#include "besovkit/corpus.hpp"

#include <cmath>
#include <random>

#include "besovkit/kernels.hpp"

namespace bk {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// deterministic unit direction in C^d
EVector random_direction(std::mt19937_64& rng, const ValueSpace& space) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  EVector v = EVector::zero(space.dim);
  for (auto& z : v.c) z = cplx(gauss(rng), gauss(rng));
  return e_unit(v, space);
}

GridFunction embed_scalar(const GridFunction& scalar, const ValueSpace& space,
                          const EVector& dir) {
  GridFunction out(scalar.grid(), space);
  for (int c = 0; c < space.dim; ++c) {
    out.plane(c) = scalar.plane(0);
    for (auto& z : out.plane(c)) z *= dir.c[std::size_t(c)];
  }
  return out;
}

} // namespace

GridFunction band_truncate(const GridFunction& f, double radius) {
  auto spec = spectrum_of(f);
  const Grid& g = f.grid();
  for (auto& pl : spec)
    for (std::size_t i = 0; i < pl.size(); ++i) {
      auto xi = g.freq_at(i);
      if (std::hypot(xi[0], xi[1]) > radius) pl[i] = cplx(0, 0);
    }
  return GridFunction::from_spectrum(g, f.space(), std::move(spec));
}

GridFunction gaussian_bump(const Grid& grid, const ValueSpace& space, double width,
                           std::array<double, 2> center, double modulation) {
  GridFunction scalar = GridFunction::from_scalar(grid, [&](const std::array<double, 2>& x) {
    double d0 = grid.wrap_delta(x[0] - center[0]);
    double arg = d0 * d0;
    double phase = modulation * d0;
    if (grid.n == 2) {
      double d1 = grid.wrap_delta(x[1] - center[1]);
      arg += d1 * d1;
      phase += modulation * d1;
    }
    double env = std::exp(-arg / (2.0 * width * width));
    return cplx(env * std::cos(phase), env * std::sin(phase));
  });
  if (space.dim == 1) return scalar;
  EVector dir = EVector::basis(space.dim, 0);
  return embed_scalar(scalar, space, dir);
}

std::vector<NamedFunction> make_band_limited_family(const Grid& grid, const ValueSpace& space,
                                                    double radius, std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<NamedFunction> out;
  for (int i = 0; i < count; ++i) {
    std::vector<std::vector<cplx>> spec(std::size_t(space.dim),
                                        std::vector<cplx>(grid.points(), cplx(0, 0)));
    for (int c = 0; c < space.dim; ++c)
      for (std::size_t idx = 0; idx < grid.points(); ++idx) {
        auto xi = grid.freq_at(idx);
        double r = std::hypot(xi[0], xi[1]);
        if (r > radius) continue;
        double decay = 1.0 / (1.0 + r * r);
        spec[std::size_t(c)][idx] = decay * cplx(gauss(rng), gauss(rng));
      }
    out.push_back({"band_r" + std::to_string(radius) + "_" + std::to_string(i),
                   GridFunction::from_spectrum(grid, space, std::move(spec))});
  }
  return out;
}

std::vector<NamedFunction> make_corpus(const Grid& grid, const ValueSpace& space,
                                       std::uint64_t seed, int count, double freq_cap) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double cutoff = std::ldexp(1.0, max_dyadic_level(grid) - 1);
  if (freq_cap > 0.0) cutoff = std::min(cutoff, freq_cap);
  double span = 0.25 * grid.T;

  std::vector<NamedFunction> out;
  auto push = [&](const std::string& name, GridFunction f) {
    if (int(out.size()) >= count) return;
    out.push_back({name, band_truncate(f, cutoff)});
  };

  // Gaussians at varied widths and centers
  double base_w = grid.T / 40.0;
  for (double w : {1.0, 1.5, 2.5, 4.0}) {
    double width = std::max(0.8, base_w) * w;
    double c0 = (unit(rng) - 0.5) * span;
    double c1 = grid.n == 2 ? (unit(rng) - 0.5) * span : 0.0;
    push("gauss_w" + std::to_string(width).substr(0, 4),
         gaussian_bump(grid, space, width, {c0, c1}));
  }

  // modulated bumps
  for (double k : {2.0, 5.0}) {
    double width = std::max(1.2, base_w * 1.5);
    push("mod_k" + std::to_string(int(k)), gaussian_bump(grid, space, width, {0.0, 0.0}, k));
  }

  // random band-limited fields; the radius is pinned absolutely (capped by the
  // dyadic range) so the corpus is stable under grid refinement
  double rad = std::min(12.0, 0.5 * cutoff);
  auto rnd = make_band_limited_family(grid, space, rad, seed ^ 0x9e3779b97f4a7c15ull, 6);
  for (auto& nf : rnd) push("rand_" + std::to_string(&nf - rnd.data()), std::move(nf.fn));

  // vector-valued variants with random unit directions
  for (int i = 0; i < 3; ++i) {
    EVector dir = random_direction(rng, space);
    GridFunction scalar =
        gaussian_bump(grid, ValueSpace::euclidean(1), std::max(1.0, base_w) * (1.0 + 0.5 * i),
                      {(unit(rng) - 0.5) * span, grid.n == 2 ? (unit(rng) - 0.5) * span : 0.0});
    push("vec_" + std::to_string(i), embed_scalar(scalar, space, dir));
  }

  // adversarial entries: near-boundary support, single lattice modes
  {
    double width = std::max(0.8, base_w);
    double edge = 0.5 * grid.T - 6.0 * width;
    push("edge_bump", gaussian_bump(grid, space, width, {edge, 0.0}));
  }
  for (double target : {3.0, std::min(10.0, 0.55 * cutoff)}) {
    long kidx = std::lround(target * grid.T / (2.0 * kPi));
    if (kidx < 1) kidx = 1;
    double xi0 = 2.0 * kPi * double(kidx) / grid.T;
    GridFunction mode = GridFunction::from_scalar(grid, [&](const std::array<double, 2>& x) {
      double phase = xi0 * x[0];
      return cplx(std::cos(phase), std::sin(phase));
    });
    if (space.dim > 1) mode = embed_scalar(mode, space, EVector::basis(space.dim, 0));
    push("mode_xi" + std::to_string(xi0).substr(0, 4), std::move(mode));
  }

  // fill the remainder with more random fields
  int extra = 0;
  while (int(out.size()) < count) {
    auto more = make_band_limited_family(grid, space, rad, seed + 17 * (++extra), 1);
    push("rand_extra_" + std::to_string(extra), std::move(more[0].fn));
  }
  return out;
}

std::vector<NamedFunction> smooth_bump_corpus(const Grid& grid, const ValueSpace& space,
                                              std::uint64_t seed, int count) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  double span = 0.2 * grid.T;
  double base_w = std::max(1.0, grid.T / 30.0);
  std::vector<NamedFunction> out;
  for (int i = 0; i < count; ++i) {
    double width = base_w * (1.0 + 0.4 * double(i % 3));
    double c0 = (unit(rng) - 0.5) * span;
    double c1 = grid.n == 2 ? (unit(rng) - 0.5) * span : 0.0;
    double mod = (i % 2 == 1) ? 1.5 : 0.0;
    out.push_back({"bump_" + std::to_string(i),
                   gaussian_bump(grid, space, width, {c0, c1}, mod)});
  }
  return out;
}

} // namespace bk

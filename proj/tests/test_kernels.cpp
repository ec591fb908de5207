#include <doctest.h>

#include <cmath>
#include <random>

#include "besovkit/kernels.hpp"

using namespace bk;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("dyadic system: value at zero, telescoping sum, annulus supports") {
  Grid g = Grid::make(1, 512, 16.0);
  int J = max_dyadic_level(g);
  DyadicSystem sys = build_dyadic_system(g, J);

  CHECK(sys.phi[0]({std::array<double, 2>{0.0, 0.0}}).real() == 1.0);

  double cover = std::ldexp(1.0, J - 1);
  for (std::size_t i = 0; i < g.N; ++i) {
    double xi = g.freq(i);
    double r = std::abs(xi);
    double sum = 0.0;
    int nonzero = 0;
    for (int j = 0; j <= J; ++j) {
      double v = sys.phi[std::size_t(j)]({std::array<double, 2>{xi, 0.0}}).real();
      // exact support: phi_0 in {r <= 2}, phi_j in {2^{j-1} <= r <= 2^{j+1}}
      if (j == 0 && r > 2.0) CHECK(v == 0.0);
      if (j > 0 && (r < std::ldexp(1.0, j - 1) || r > std::ldexp(1.0, j + 1))) CHECK(v == 0.0);
      if (v != 0.0) ++nonzero;
      sum += v;
    }
    if (r <= cover) {
      CHECK(std::abs(sum - 1.0) < 1e-10);
      CHECK(nonzero <= 2);
    }
  }
}

TEST_CASE("dyadic system: phi_1(3) + phi_2(3) = 1 with both factors in (0,1)") {
  Grid g = Grid::make(1, 512, 16.0);
  DyadicSystem sys = build_dyadic_system(g, 4);
  std::array<double, 2> xi{3.0, 0.0};
  double p1 = sys.phi[1](xi).real();
  double p2 = sys.phi[2](xi).real();
  CHECK(p1 > 0.0);
  CHECK(p1 < 1.0);
  CHECK(p2 > 0.0);
  CHECK(p2 < 1.0);
  CHECK(p1 + p2 == doctest::Approx(1.0).epsilon(1e-12));
  // oracle: direct evaluation of the cutoff profile
  CHECK(p1 == doctest::Approx(bump_rho(1.5) - bump_rho(3.0)).epsilon(1e-14));
  CHECK(bump_rho(1.5) == doctest::Approx(0.5).epsilon(1e-14)); // glue midpoint
}

TEST_CASE("dyadic system derivative bounds: scaled Lipschitz constants are uniform in j") {
  Grid g = Grid::make(1, 1024, 16.0);
  int J = max_dyadic_level(g);
  DyadicSystem sys = build_dyadic_system(g, J);
  std::vector<double> lip(std::size_t(J) + 1, 0.0);
  for (int j = 0; j <= J; ++j) {
    for (std::size_t i = 0; i + 1 < g.N / 2; ++i) {
      double x0 = g.freq(i), x1 = g.freq(i + 1);
      double v0 = sys.phi[std::size_t(j)]({std::array<double, 2>{x0, 0.0}}).real();
      double v1 = sys.phi[std::size_t(j)]({std::array<double, 2>{x1, 0.0}}).real();
      lip[std::size_t(j)] =
          std::max(lip[std::size_t(j)], std::abs(v1 - v0) / (std::abs(x1 - x0)));
    }
    lip[std::size_t(j)] *= std::ldexp(1.0, j); // |phi_j'| ~ c 2^{-j}
  }
  double lo = kInf, hi = 0.0;
  for (int j = 1; j <= J; ++j) {
    lo = std::min(lo, lip[std::size_t(j)]);
    hi = std::max(hi, lip[std::size_t(j)]);
  }
  CHECK(hi > 0.0);
  CHECK(hi / lo < 3.0);
}

TEST_CASE("annuli exceeding the lattice are rejected") {
  Grid g = Grid::make(1, 64, 16.0); // max freq = pi*4
  CHECK_THROWS_AS(build_dyadic_system(g, 6), error);
}

TEST_CASE("local means: moment cancellation and the mean oracle") {
  Grid g = Grid::make(1, 1024, 20.0);
  LocalMeansKernels lm = build_local_means(g, 2);

  auto spec_kN = spectrum_of(lm.kN());
  // zero frequency of k^N vanishes: the Laplacian kills the mean
  CHECK(std::abs(spec_kN[0][0]) < 1e-12);

  // moments of the analytic kernel vanish through order 2N - 1 = 3
  for (int beta = 0; beta <= 3; ++beta)
    CHECK(std::abs(lm.kN_moment({beta, 0})) < 1e-10);
  // ... and the first non-vanishing one does not
  CHECK(std::abs(lm.kN_moment({4, 0})) > 1e-6);

  // khat_0(0) = (2pi)^{-1/2} * integral of k0, via the sample-sum oracle
  double mass = 0.0;
  for (std::size_t i = 0; i < g.N; ++i) mass += lm.k0().plane(0)[i].real();
  mass *= g.h();
  CHECK(mass > 0.0);
  double sym0 = lm.symbol_k0()({std::array<double, 2>{0.0, 0.0}}).real();
  CHECK(sym0 == doctest::Approx(mass / std::sqrt(2.0 * kPi)).epsilon(1e-12));

  // k^N symbol identity on the lattice
  auto spec_k0 = spectrum_of(lm.k0_base());
  for (std::size_t b = 0; b < g.N; b += 37) {
    double r = std::abs(g.freq(b));
    cplx expect = std::pow(-r * r, 2.0) * spec_k0[0][b];
    CHECK(std::abs(spec_kN[0][b] - expect) < 1e-10);
  }

  CHECK_THROWS_AS(build_local_means(g, 0), error);
}

TEST_CASE("poisson multiplier values") {
  Multiplier p0 = poisson_multiplier(0.7, 0);
  CHECK(p0({std::array<double, 2>{0.0, 0.0}}).real() == 1.0);
  Multiplier p2 = poisson_multiplier(0.7, 2);
  CHECK(p2({std::array<double, 2>{0.0, 0.0}}).real() == 0.0);
  Multiplier p1 = poisson_multiplier(1.0, 0);
  CHECK(p1({std::array<double, 2>{1.0, 0.0}}).real() == doctest::Approx(std::exp(-1.0)));
  CHECK_THROWS_AS(poisson_multiplier(0.0, 0), error);
}

TEST_CASE("poisson extension: constants, eigenmodes, t-derivative, semigroup") {
  Grid g = Grid::make(1, 256, 2.0 * kPi);
  auto c = GridFunction::from_scalar(g, [](const std::array<double, 2>&) { return cplx(3, 1); });
  for (double t : {0.25, 1.0}) {
    GridFunction u = poisson_extend(c, t, 0);
    CHECK(u.max_abs_diff(c) < 1e-12);
  }

  GridFunction mode = GridFunction::from_scalar(g, [](const std::array<double, 2>& x) {
    return cplx(std::cos(4.0 * x[0]), std::sin(4.0 * x[0]));
  });
  double t = 0.3;
  GridFunction u0 = poisson_extend(mode, t, 0);
  GridFunction expect0 = mode;
  expect0 *= cplx(std::exp(-4.0 * t), 0);
  CHECK(u0.max_abs_diff(expect0) < 1e-11);

  GridFunction u1 = poisson_extend(mode, t, 1);
  GridFunction expect1 = mode;
  expect1 *= cplx(-4.0 * std::exp(-4.0 * t), 0);
  CHECK(u1.max_abs_diff(expect1) < 1e-11);

  // semigroup: extend(extend(f, s), t) = extend(f, s + t)
  GridFunction f = mode + c;
  GridFunction two_step = poisson_extend(poisson_extend(f, 0.2, 0), 0.5, 0);
  GridFunction one_step = poisson_extend(f, 0.7, 0);
  CHECK(two_step.max_abs_diff(one_step) < 1e-12 * lp_norm(f, kInf));
}

TEST_CASE("partition window: exact partition of unity, support, positivity") {
  Grid g = Grid::make(1, 512, 16.0);
  PartitionWindow w = build_partition_window(g, 1.3);

  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(-8.0, 8.0);
  for (int trial = 0; trial < 100; ++trial) {
    double x = u(rng);
    double sum = 0.0;
    for (long m = std::lround(std::floor(x)) - 2; m <= std::lround(std::floor(x)) + 2; ++m)
      sum += w.psi1(x - double(m));
    CHECK(std::abs(sum - 1.0) < 1e-10);
  }

  CHECK(w.psi1(0.0) > 0.0);
  CHECK(w.psi1(0.66) == 0.0);  // outside d/2 = 0.65
  CHECK(w.psi1(-0.66) == 0.0);

  CHECK_THROWS_AS(build_partition_window(g, 1.0), error);
  CHECK_THROWS_AS(build_partition_window(Grid::make(1, 16, 16.0), 1.3), error);
}

TEST_CASE("window derivative tables match finite differences") {
  Grid g = Grid::make(1, 512, 16.0);
  PartitionWindow w = build_partition_window(g, 1.3);
  double h = 1e-4;
  for (double x : {0.1, -0.33, 0.52}) {
    double fd1 = (w.psi1(x + h) - w.psi1(x - h)) / (2 * h);
    CHECK(w.psi1_deriv(x, 1) == doctest::Approx(fd1).epsilon(1e-5));
    double fd2 = (w.psi1(x + h) - 2 * w.psi1(x) + w.psi1(x - h)) / (h * h);
    CHECK(w.psi1_deriv(x, 2) == doctest::Approx(fd2).epsilon(1e-4));
  }
}

TEST_CASE("quark profiles: base cases and moment cancellation") {
  Grid g = Grid::make(1, 512, 16.0);
  PartitionWindow w = build_partition_window(g, 1.3);

  QuarkProfile q0 = quark_profile(w, {0, 0}, -1);
  GridFunction psi = w.sampled(g);
  CHECK(q0.profile.max_abs_diff(psi) == 0.0);

  QuarkProfile q1 = quark_profile(w, {1, 0}, -1);
  for (std::size_t i = 0; i < g.N; i += 19) {
    double x = g.coord(i);
    CHECK(q1.profile.plane(0)[i].real() == doctest::Approx(x * w.psi1(x)).epsilon(1e-13));
  }

  // L = 1: the Laplacian output has zero mean
  QuarkProfile qL = quark_profile(w, {0, 0}, 1);
  cplx mean(0, 0);
  for (std::size_t i = 0; i < g.N; ++i) mean += qL.profile.plane(0)[i];
  CHECK(std::abs(mean) * g.h() < 1e-12);

  // moment conditions: |int x^beta profile| < 1e-8 for beta <= L
  for (int gamma = 0; gamma <= 2; ++gamma)
    for (int beta = 0; beta <= 1; ++beta)
      CHECK(std::abs(quark_profile_moment(w, {gamma, 0}, 1, {beta, 0})) < 1e-8);
  // the L = 3 profile keeps three vanishing moments
  for (int beta = 0; beta <= 3; ++beta)
    CHECK(std::abs(quark_profile_moment(w, {1, 0}, 3, {beta, 0})) < 1e-8);

  CHECK_THROWS_AS(quark_profile(w, {0, 0}, 2), error); // even L has no integer (L+1)/2
}

#include <doctest.h>

#include <random>

#include "besovkit/value_space.hpp"

using namespace bk;

TEST_CASE("norm of the zero vector is zero") {
  for (auto space : {ValueSpace::euclidean(3), ValueSpace::p_norm(3, 1.0),
                     ValueSpace::p_norm(3, kInf)})
    CHECK(e_norm(EVector::zero(3), space) == 0.0);
}

TEST_CASE("euclidean norm: (3,4) has norm 5") {
  EVector v({cplx(3, 0), cplx(4, 0)});
  CHECK(e_norm(v, ValueSpace::euclidean(2)) == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("1-norm: (1,1,1) has norm 3") {
  EVector v({cplx(1, 0), cplx(1, 0), cplx(1, 0)});
  CHECK(e_norm(v, ValueSpace::p_norm(3, 1.0)) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("dimension mismatch is rejected") {
  EVector v({cplx(1, 0)});
  CHECK_THROWS_AS(e_norm(v, ValueSpace::euclidean(2)), error);
}

TEST_CASE("e_unit normalizes directions") {
  CHECK(e_unit(EVector({cplx(2, 0), cplx(0, 0)}), ValueSpace::euclidean(2)).c[0] ==
        cplx(1, 0));
  CHECK(e_unit(EVector({cplx(0, 0), cplx(5, 0)}), ValueSpace::euclidean(2)).c[1] ==
        cplx(1, 0));
  auto u = e_unit(EVector({cplx(1, 0), cplx(1, 0)}), ValueSpace::p_norm(2, 1.0));
  CHECK(u.c[0] == cplx(0.5, 0));
  CHECK(u.c[1] == cplx(0.5, 0));
}

TEST_CASE("e_unit rejects the zero vector") {
  CHECK_THROWS_AS(e_unit(EVector::zero(2), ValueSpace::euclidean(2)), error);
}

TEST_CASE("norm axioms hold for random vectors across the p-norm family") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  for (double r : {1.0, 1.5, 2.0, 4.0, kInf}) {
    ValueSpace space = ValueSpace::p_norm(4, r);
    for (int trial = 0; trial < 50; ++trial) {
      EVector v = EVector::zero(4), w = EVector::zero(4);
      for (int i = 0; i < 4; ++i) {
        v.c[i] = cplx(g(rng), g(rng));
        w.c[i] = cplx(g(rng), g(rng));
      }
      cplx scale(g(rng), g(rng));
      EVector sv = v;
      for (auto& z : sv.c) z *= scale;
      double lhs = e_norm(sv, space);
      double rhs = std::abs(scale) * e_norm(v, space);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-14));

      EVector sum = v;
      for (int i = 0; i < 4; ++i) sum.c[i] += w.c[i];
      CHECK(e_norm(sum, space) <= e_norm(v, space) + e_norm(w, space) + 1e-12);

      if (e_norm(v, space) > 0)
        CHECK(e_norm(e_unit(v, space), space) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

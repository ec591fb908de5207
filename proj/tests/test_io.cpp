#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "besovkit/corpus.hpp"
#include "besovkit/io.hpp"

using namespace bk;

namespace {

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("bk_io_test_" + std::to_string(std::rand()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST_CASE("grid function container round trip is bit exact") {
  TempDir tmp;
  Grid g = Grid::make(2, 16, 6.0);
  GridFunction f = gaussian_bump(g, ValueSpace::p_norm(3, 1.5), 1.0, {0.5, -0.25});
  std::string path = (tmp.path / "f.bkgf").string();
  write_grid_function(path, f, "bump");
  GridFunction back = read_grid_function(path);
  CHECK(back.grid() == f.grid());
  CHECK(back.space() == f.space());
  CHECK(back.max_abs_diff(f) == 0.0);
  CHECK(std::filesystem::exists(path + ".json"));
}

TEST_CASE("corrupted containers are rejected with an io failure") {
  TempDir tmp;
  std::string path = (tmp.path / "bad.bkgf").string();
  std::ofstream os(path, std::ios::binary);
  os << "NOPE this is not a container";
  os.close();
  CHECK_THROWS_AS(read_grid_function(path), error);
  CHECK_THROWS_AS(peek_representation_kind(path), error);
}

TEST_CASE("space params json: infinities survive the round trip") {
  SpaceParams prm = SpaceParams::make(2, 0.5, kInf, kInf, Family::B);
  SpaceParams back = space_params_from_json(space_params_to_json(prm));
  CHECK(back.p == kInf);
  CHECK(back.q == kInf);
  CHECK(back.s == prm.s);
  CHECK(back.family == prm.family);
}

TEST_CASE("quark representation round trip preserves coefficients and directions") {
  TempDir tmp;
  SpaceParams prm = SpaceParams::make(1, 1.0, 2.0, 2.0, Family::B);
  QuarkRepresentation rep;
  rep.prm = prm;
  rep.gamma_max = 2;
  rep.M_smooth = 2.0;
  rep.L = 1;
  rep.mu = 3;
  rep.d = 1.3;
  rep.per_gamma.resize(2);
  rep.per_gamma[0].gamma = {0, 0};
  rep.per_gamma[0].rho.coeff = CoefficientField::make(1, 8);
  rep.per_gamma[0].lam.coeff = CoefficientField::make(1, 8);
  rep.per_gamma[0].lam.coeff.set(3, 5, 0, cplx(0.5, -0.25));
  rep.per_gamma[0].lam.dirs[{3, 5}] = EVector({cplx(0, 1)});
  rep.per_gamma[1].gamma = {1, 0};
  rep.per_gamma[1].rho.coeff = CoefficientField::make(1, 8);
  rep.per_gamma[1].lam.coeff = CoefficientField::make(1, 8);
  rep.per_gamma[1].rho.coeff.set(4, 9, 0, cplx(1.25, 0));
  rep.per_gamma[1].rho.dirs[{4, 9}] = EVector({cplx(1, 0)});
  rep.decay_stat = 2.5;

  std::string path = (tmp.path / "rep.bkrp").string();
  write_representation(path, rep);
  CHECK(peek_representation_kind(path) == RepKind::quark);
  QuarkRepresentation back = read_quark_representation(path);
  CHECK(back.L == 1);
  CHECK(back.M_smooth == 2.0);
  CHECK(back.gamma_max == 2);
  REQUIRE(back.per_gamma.size() == 2);
  bool found = false;
  for (const auto& pg : back.per_gamma)
    if (pg.gamma == std::array<int, 2>{0, 0}) {
      found = true;
      CHECK(pg.lam.coeff.levels.at(3).at(5) == cplx(0.5, -0.25));
      CHECK(pg.lam.dirs.at({3, 5}).c[0] == cplx(0, 1));
    }
  CHECK(found);
}

TEST_CASE("harmonic representation files restore atoms exactly") {
  TempDir tmp;
  Grid g = Grid::make(1, 512, 16.0);
  SpaceParams prm = SpaceParams::make(1, 1.0, 2.0, 2.0, Family::B);
  GridFunction bump = gaussian_bump(g, ValueSpace::euclidean(1), 0.2, {0.5, 0.0});
  Atom a = make_atom(bump, 3, {68, 0}, 1.3, Atom::Kind::sp_KL, prm.K, -1);
  AtomicRepresentation rep;
  rep.prm = prm;
  rep.mu = 3;
  rep.d = 1.3;
  rep.grid = g;
  rep.space = ValueSpace::euclidean(1);
  rep.coefficients = CoefficientField::make(1, 16);
  rep.coefficients.set(3, 68, 0, cplx(2, 1));
  rep.atoms.push_back(a);

  std::string path = (tmp.path / "atomic.bkrp").string();
  write_representation(path, rep);
  CHECK(peek_representation_kind(path) == RepKind::harmonic_atomic);
  AtomicRepresentation back = read_atomic_representation(path);
  CHECK(back.grid == g);
  CHECK(back.coefficients.levels.at(3).at(68) == cplx(2, 1));
  REQUIRE(back.atoms.size() == 1);
  CHECK(reconstruct_atomic(back).max_abs_diff(reconstruct_atomic(rep)) == 0.0);
}

#include "besovkit/io.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace bk {

static_assert(std::endian::native == std::endian::little,
              "container formats are little-endian; big-endian hosts are not supported");

namespace {

using nlohmann::json;

void put_bytes(std::ostream& os, const void* p, std::size_t n) {
  os.write(reinterpret_cast<const char*>(p), std::streamsize(n));
}

template <typename T>
void put(std::ostream& os, T v) {
  put_bytes(os, &v, sizeof(T));
}

template <typename T>
T get(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) fail(errc::io_failure, "unexpected end of file");
  return v;
}

json pq_to_json(double v) {
  if (v == kInf) return json("inf");
  return json(v);
}

double pq_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    fail(errc::io_failure, "bad p/q encoding");
  }
  return j.get<double>();
}

json params_json(const SpaceParams& prm) {
  return json{{"n", prm.n},
              {"s", prm.s},
              {"p", pq_to_json(prm.p)},
              {"q", pq_to_json(prm.q)},
              {"family", prm.family == Family::B ? "B" : "F"},
              {"K", prm.K},
              {"L", prm.L},
              {"a", prm.a},
              {"mu", prm.mu},
              {"k_poisson", prm.k_poisson}};
}

SpaceParams params_from(const json& j) {
  SpaceParams prm;
  prm.n = j.at("n").get<int>();
  prm.s = j.at("s").get<double>();
  prm.p = pq_from_json(j.at("p"));
  prm.q = pq_from_json(j.at("q"));
  prm.family = j.at("family").get<std::string>() == "B" ? Family::B : Family::F;
  prm.K = j.at("K").get<int>();
  prm.L = j.at("L").get<int>();
  prm.a = j.at("a").get<double>();
  prm.mu = j.at("mu").get<int>();
  prm.k_poisson = j.at("k_poisson").get<int>();
  prm.validate();
  return prm;
}

json grid_json(const Grid& g) { return json{{"n", g.n}, {"N", g.N}, {"T", g.T}}; }

Grid grid_from(const json& j) {
  return Grid::make(j.at("n").get<int>(), j.at("N").get<std::size_t>(), j.at("T").get<double>());
}

json space_json(const ValueSpace& s) {
  return json{{"dim", s.dim}, {"r", s.r == kInf ? json("inf") : json(s.r)}};
}

ValueSpace vspace_from(const json& j) {
  double r = pq_from_json(j.at("r"));
  return ValueSpace::make(j.at("dim").get<int>(), r);
}

constexpr char kGridMagic[4] = {'B', 'K', 'G', 'F'};
constexpr char kRepMagic[4] = {'B', 'K', 'R', 'P'};

void write_coeff_block(std::ostream& os, const QuarkRepresentation& rep) {
  std::uint64_t count = 0;
  for (const auto& pg : rep.per_gamma) {
    for (const auto& [nu, entries] : pg.rho.coeff.levels) count += entries.size();
    for (const auto& [nu, entries] : pg.lam.coeff.levels) count += entries.size();
  }
  put<std::uint64_t>(os, count);
  for (const auto& pg : rep.per_gamma)
    for (int branch = 0; branch < 2; ++branch) {
      const auto& br = branch == 0 ? pg.rho : pg.lam;
      for (const auto& [nu, entries] : br.coeff.levels)
        for (const auto& [mflat, v] : entries) {
          put<std::uint32_t>(os, std::uint32_t(nu));
          put<std::uint8_t>(os, std::uint8_t(branch));
          put<std::int8_t>(os, std::int8_t(pg.gamma[0]));
          put<std::int8_t>(os, std::int8_t(pg.gamma[1]));
          put<std::uint8_t>(os, 0);
          put<std::uint64_t>(os, mflat);
          put<double>(os, v.real());
          put<double>(os, v.imag());
          auto dit = br.dirs.find({nu, mflat});
          if (dit == br.dirs.end()) fail(errc::io_failure, "write_representation: missing direction");
          for (const auto& z : dit->second.c) {
            put<double>(os, z.real());
            put<double>(os, z.imag());
          }
        }
    }
}

} // namespace

std::string space_params_to_json(const SpaceParams& prm) { return params_json(prm).dump(); }

SpaceParams space_params_from_json(const std::string& s) { return params_from(json::parse(s)); }

void write_grid_function(const std::string& path, const GridFunction& f,
                         const std::string& label) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(errc::io_failure, "cannot open " + path + " for writing");
  put_bytes(os, kGridMagic, 4);
  put<std::uint8_t>(os, 1); // version
  put<std::uint8_t>(os, std::uint8_t(f.grid().n));
  put<std::uint8_t>(os, f.space().r == kInf ? 1 : 0);
  put<std::uint8_t>(os, 0);
  put<std::uint32_t>(os, std::uint32_t(f.dim()));
  put<std::uint64_t>(os, std::uint64_t(f.grid().N));
  put<double>(os, f.grid().T);
  put<double>(os, f.space().r == kInf ? 0.0 : f.space().r);
  for (int c = 0; c < f.dim(); ++c)
    for (const auto& z : f.plane(c)) {
      put<double>(os, z.real());
      put<double>(os, z.imag());
    }
  if (!os) fail(errc::io_failure, "write failure on " + path);

  json side{{"grid", grid_json(f.grid())},
            {"value_space", space_json(f.space())},
            {"format", "bkgf-v1"},
            {"label", label}};
  std::ofstream js(path + ".json");
  js << side.dump(2) << "\n";
}

GridFunction read_grid_function(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(errc::io_failure, "cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kGridMagic, 4) != 0)
    fail(errc::io_failure, path + ": bad magic (not a grid-function container)");
  auto version = get<std::uint8_t>(is);
  if (version != 1) fail(errc::io_failure, path + ": unsupported container version");
  int n = get<std::uint8_t>(is);
  bool r_inf = get<std::uint8_t>(is) != 0;
  get<std::uint8_t>(is);
  int d = int(get<std::uint32_t>(is));
  std::size_t N = std::size_t(get<std::uint64_t>(is));
  double T = get<double>(is);
  double r = get<double>(is);
  Grid g = Grid::make(n, N, T);
  ValueSpace space = ValueSpace::make(d, r_inf ? kInf : r);
  GridFunction f(g, space);
  for (int c = 0; c < d; ++c)
    for (auto& z : f.plane(c)) {
      double re = get<double>(is);
      double im = get<double>(is);
      z = cplx(re, im);
    }
  return f;
}

void write_representation(const std::string& path, const QuarkRepresentation& rep) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(errc::io_failure, "cannot open " + path + " for writing");
  put_bytes(os, kRepMagic, 4);
  put<std::uint8_t>(os, 1);
  put<std::uint8_t>(os, 0); // kind: quark
  put<std::uint16_t>(os, 0);
  int dim = 1;
  for (const auto& pg : rep.per_gamma) {
    for (const auto& [key, v] : pg.rho.dirs) dim = std::max(dim, v.dim());
    for (const auto& [key, v] : pg.lam.dirs) dim = std::max(dim, v.dim());
  }
  int T_int = 1;
  for (const auto& pg : rep.per_gamma) {
    T_int = std::max(T_int, pg.rho.coeff.T_int);
    T_int = std::max(T_int, pg.lam.coeff.T_int);
  }
  json header{{"params", params_json(rep.prm)},
              {"mu", rep.mu},
              {"gamma_max", rep.gamma_max},
              {"M_smooth", rep.M_smooth},
              {"L", rep.L},
              {"window", {{"d", rep.d}}},
              {"dim", dim},
              {"T_int", T_int},
              {"decay_stat", rep.decay_stat}};
  std::string hs = header.dump();
  put<std::uint32_t>(os, std::uint32_t(hs.size()));
  put_bytes(os, hs.data(), hs.size());
  write_coeff_block(os, rep);
  if (!os) fail(errc::io_failure, "write failure on " + path);
}

void write_representation(const std::string& path, const AtomicRepresentation& rep) {
  std::ofstream os(path, std::ios::binary);
  if (!os) fail(errc::io_failure, "cannot open " + path + " for writing");
  put_bytes(os, kRepMagic, 4);
  put<std::uint8_t>(os, 1);
  put<std::uint8_t>(os, 1); // kind: harmonic-atomic
  put<std::uint16_t>(os, 0);
  json header{{"params", params_json(rep.prm)},
              {"mu", rep.mu},
              {"window", {{"d", rep.d}}},
              {"grid", grid_json(rep.grid)},
              {"value_space", space_json(rep.space)}};
  std::string hs = header.dump();
  put<std::uint32_t>(os, std::uint32_t(hs.size()));
  put_bytes(os, hs.data(), hs.size());

  std::uint64_t count = 0;
  for (const auto& [nu, entries] : rep.coefficients.levels) count += entries.size();
  put<std::uint64_t>(os, count);
  std::size_t idx = 0;
  for (const auto& [nu, entries] : rep.coefficients.levels)
    for (const auto& [mflat, v] : entries) {
      const Atom& a = rep.atoms[idx++];
      put<std::uint32_t>(os, std::uint32_t(nu));
      put<std::uint64_t>(os, mflat);
      put<double>(os, v.real());
      put<double>(os, v.imag());
      put<std::uint64_t>(os, a.m[0]);
      put<std::uint64_t>(os, a.m[1]);
      put<std::uint64_t>(os, a.start[0]);
      put<std::uint64_t>(os, a.start[1]);
      put<std::uint64_t>(os, a.extent[0]);
      put<std::uint64_t>(os, a.extent[1]);
      for (const auto& plane : a.samples)
        for (const auto& z : plane) {
          put<double>(os, z.real());
          put<double>(os, z.imag());
        }
    }
  if (!os) fail(errc::io_failure, "write failure on " + path);
}

RepKind peek_representation_kind(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(errc::io_failure, "cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kRepMagic, 4) != 0)
    fail(errc::io_failure, path + ": bad magic (not a representation container)");
  get<std::uint8_t>(is);
  return get<std::uint8_t>(is) == 0 ? RepKind::quark : RepKind::harmonic_atomic;
}

QuarkRepresentation read_quark_representation(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(errc::io_failure, "cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kRepMagic, 4) != 0)
    fail(errc::io_failure, path + ": bad magic (not a representation container)");
  if (get<std::uint8_t>(is) != 1) fail(errc::io_failure, path + ": unsupported version");
  if (get<std::uint8_t>(is) != 0) fail(errc::io_failure, path + ": not a quark representation");
  get<std::uint16_t>(is);
  auto hlen = get<std::uint32_t>(is);
  std::string hs(hlen, '\0');
  is.read(hs.data(), hlen);
  json header = json::parse(hs);

  QuarkRepresentation rep;
  rep.prm = params_from(header.at("params"));
  rep.mu = header.at("mu").get<int>();
  rep.gamma_max = header.at("gamma_max").get<int>();
  rep.M_smooth = header.at("M_smooth").get<double>();
  rep.L = header.at("L").get<int>();
  rep.d = header.at("window").at("d").get<double>();
  rep.decay_stat = header.value("decay_stat", 0.0);
  int dim = header.at("dim").get<int>();
  int T_int = header.at("T_int").get<int>();

  auto gamma_slot = [&](std::array<int, 2> gm) -> QuarkRepresentation::PerGamma& {
    for (auto& pg : rep.per_gamma)
      if (pg.gamma == gm) return pg;
    rep.per_gamma.push_back({});
    rep.per_gamma.back().gamma = gm;
    rep.per_gamma.back().rho.coeff = CoefficientField::make(rep.prm.n, T_int);
    rep.per_gamma.back().lam.coeff = CoefficientField::make(rep.prm.n, T_int);
    return rep.per_gamma.back();
  };

  auto count = get<std::uint64_t>(is);
  for (std::uint64_t i = 0; i < count; ++i) {
    int nu = int(get<std::uint32_t>(is));
    int branch = get<std::uint8_t>(is);
    int g0 = get<std::int8_t>(is);
    int g1 = get<std::int8_t>(is);
    get<std::uint8_t>(is);
    auto mflat = get<std::uint64_t>(is);
    double re = get<double>(is), im = get<double>(is);
    EVector dir = EVector::zero(dim);
    for (int c = 0; c < dim; ++c) {
      double dre = get<double>(is), dim2 = get<double>(is);
      dir.c[std::size_t(c)] = cplx(dre, dim2);
    }
    auto& pg = gamma_slot({g0, g1});
    auto& br = branch == 0 ? pg.rho : pg.lam;
    br.coeff.levels[nu][mflat] = cplx(re, im);
    br.coeff.nu_max = std::max(br.coeff.nu_max, nu);
    br.dirs[{nu, mflat}] = std::move(dir);
  }
  return rep;
}

AtomicRepresentation read_atomic_representation(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(errc::io_failure, "cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kRepMagic, 4) != 0)
    fail(errc::io_failure, path + ": bad magic (not a representation container)");
  if (get<std::uint8_t>(is) != 1) fail(errc::io_failure, path + ": unsupported version");
  if (get<std::uint8_t>(is) != 1) fail(errc::io_failure, path + ": not a harmonic-atomic file");
  get<std::uint16_t>(is);
  auto hlen = get<std::uint32_t>(is);
  std::string hs(hlen, '\0');
  is.read(hs.data(), hlen);
  json header = json::parse(hs);

  AtomicRepresentation rep;
  rep.prm = params_from(header.at("params"));
  rep.mu = header.at("mu").get<int>();
  rep.d = header.at("window").at("d").get<double>();
  rep.grid = grid_from(header.at("grid"));
  rep.space = vspace_from(header.at("value_space"));
  rep.coefficients = CoefficientField::make(rep.grid.n, int(std::round(rep.grid.T)));

  auto count = get<std::uint64_t>(is);
  for (std::uint64_t i = 0; i < count; ++i) {
    int nu = int(get<std::uint32_t>(is));
    auto mflat = get<std::uint64_t>(is);
    double re = get<double>(is), im = get<double>(is);
    Atom a;
    a.nu = nu;
    a.kind = Atom::Kind::sp_KL;
    a.K = rep.prm.K;
    a.L = -1;
    a.d = rep.d;
    a.grid = rep.grid;
    a.space = rep.space;
    a.m = {get<std::uint64_t>(is), get<std::uint64_t>(is)};
    a.start = {std::size_t(get<std::uint64_t>(is)), std::size_t(get<std::uint64_t>(is))};
    a.extent = {std::size_t(get<std::uint64_t>(is)), std::size_t(get<std::uint64_t>(is))};
    a.samples.assign(std::size_t(rep.space.dim),
                     std::vector<cplx>(a.extent[0] * a.extent[1]));
    for (auto& plane : a.samples)
      for (auto& z : plane) {
        double zre = get<double>(is), zim = get<double>(is);
        z = cplx(zre, zim);
      }
    rep.coefficients.levels[nu][mflat] = cplx(re, im);
    rep.coefficients.nu_max = std::max(rep.coefficients.nu_max, nu);
    rep.atoms.push_back(std::move(a));
  }
  return rep;
}

} // namespace bk

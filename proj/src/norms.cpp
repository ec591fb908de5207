#include "besovkit/norms.hpp"

#include <cmath>
#include <sstream>

#include "besovkit/quadrature.hpp"
#include "besovkit/simd.hpp"

namespace bk {

namespace {

constexpr double kPi_ = 3.141592653589793238462643383279502884;

struct LqAccum {
  double q;
  double acc = 0.0;
  double mx = 0.0;
  void add(double v) {
    if (q == kInf)
      mx = std::max(mx, v);
    else
      acc += std::pow(v, q);
  }
  double value() const { return q == kInf ? mx : std::pow(acc, 1.0 / q); }
};

// The analysis levels resolve unity on {|xi| <= 2^{J_max}}; flag inputs whose
// spectral mass escapes that region by more than a relative 1e-6.
void check_band_coverage(const Grid& g, const std::vector<std::vector<cplx>>& spec, int J_max,
                         const char* who) {
  double total = 0.0, outside = 0.0;
  double cover = std::ldexp(1.0, J_max);
  for (const auto& pl : spec)
    for (std::size_t i = 0; i < pl.size(); ++i) {
      double m = std::norm(pl[i]);
      total += m;
      auto xi = g.freq_at(i);
      if (std::hypot(xi[0], xi[1]) > cover) outside += m;
    }
  if (total > 0.0 && std::sqrt(outside / total) > 1e-6)
    fail(errc::resolution_too_small,
         std::string(who) + ": relative spectral mass " +
             std::to_string(std::sqrt(outside / total)) +
             " beyond 2^{J_max}; increase J_max or band-limit the input");
}

std::vector<double> plane_mag(const GridFunction& f, const Multiplier& m) {
  return apply_multiplier(f, m).magnitude_field();
}

// assemble the F-family norm from per-level magnitude fields
struct PointwiseLq {
  double q;
  std::size_t P;
  std::vector<double> acc;
  explicit PointwiseLq(double q, std::size_t P) : q(q), P(P), acc(P, 0.0) {}
  // weighted q-th power accumulation with an external weight (t-integrals)
  void add_pow(double w, const std::vector<double>& mag) {
    if (q == 1.0) {
      for (std::size_t i = 0; i < P; ++i) acc[i] += w * mag[i];
    } else if (q == 2.0) {
      for (std::size_t i = 0; i < P; ++i) acc[i] += w * mag[i] * mag[i];
    } else {
      for (std::size_t i = 0; i < P; ++i) acc[i] += w * std::pow(mag[i], q);
    }
  }
  void add(double weight, const std::vector<double>& mag) {
    if (q == kInf) {
      for (std::size_t i = 0; i < P; ++i) acc[i] = std::max(acc[i], weight * mag[i]);
    } else if (q == 1.0) {
      for (std::size_t i = 0; i < P; ++i) acc[i] += weight * mag[i];
    } else if (q == 2.0) {
      double w2 = weight * weight;
      for (std::size_t i = 0; i < P; ++i) acc[i] += w2 * mag[i] * mag[i];
    } else {
      for (std::size_t i = 0; i < P; ++i) acc[i] += std::pow(weight * mag[i], q);
    }
  }
  std::vector<double> finish() {
    if (q == 2.0)
      for (auto& v : acc) v = std::sqrt(v);
    else if (q != kInf && q != 1.0)
      for (auto& v : acc) v = std::pow(v, 1.0 / q);
    return std::move(acc);
  }
};

} // namespace

SpaceParams SpaceParams::make(int n, double s, double p, double q, Family family) {
  if (n != 1 && n != 2) fail(errc::invalid_argument, "SpaceParams: n must be 1 or 2");
  if (!(p > 0.0)) fail(errc::invalid_argument, "SpaceParams: p > 0 violated");
  if (!(q > 0.0)) fail(errc::invalid_argument, "SpaceParams: q > 0 violated");
  SpaceParams prm;
  prm.n = n;
  prm.s = s;
  prm.p = p;
  prm.q = q;
  prm.family = family;
  prm.K = std::max(0, 1 + int(std::floor(s)));
  double sig = prm.sigma();
  prm.L = std::max(-1, int(std::floor(sig - s)));
  double a_min = family == Family::B ? (p == kInf ? 0.0 : double(n) / p)
                                     : double(n) / std::min(p, q);
  prm.a = a_min + 0.5;
  prm.k_poisson = int(std::ceil(std::max(s, 0.0))) + n + 2;
  prm.mu = 3;
  prm.validate();
  return prm;
}

void SpaceParams::validate() const {
  if (family == Family::F && p == kInf)
    fail(errc::invalid_argument, "SpaceParams: family F requires p < infinity");
  if (K < 0) fail(errc::invalid_argument, "SpaceParams: K >= 0 violated");
  if (L < -1) fail(errc::invalid_argument, "SpaceParams: L >= -1 violated");
  if (!(a > 0.0)) fail(errc::invalid_argument, "SpaceParams: a > 0 violated");
  if (mu < 1) fail(errc::invalid_argument, "SpaceParams: mu >= 1 violated");
  if (k_poisson < 1) fail(errc::invalid_argument, "SpaceParams: k_poisson >= 1 violated");
}

SpaceParams SpaceParams::with_s(double new_s) const {
  SpaceParams prm = SpaceParams::make(n, new_s, p, q, family);
  prm.mu = mu;
  return prm;
}

double besov_norm(const GridFunction& f, const DyadicSystem& sys, const SpaceParams& prm) {
  GridFunction F = transform_forward(f);
  check_band_coverage(f.grid(), F.spectrum(), sys.J_max, "besov_norm");
  LqAccum acc{prm.q};
  for (int j = 0; j <= sys.J_max; ++j) {
    double nj = lp_norm_field(f.grid(), plane_mag(F, sys.phi[std::size_t(j)]), prm.p);
    acc.add(std::pow(2.0, double(j) * prm.s) * nj);
  }
  return acc.value();
}

double triebel_norm(const GridFunction& f, const DyadicSystem& sys, const SpaceParams& prm) {
  if (prm.p == kInf) fail(errc::invalid_argument, "triebel_norm: p = infinity not admissible");
  GridFunction F = transform_forward(f);
  check_band_coverage(f.grid(), F.spectrum(), sys.J_max, "triebel_norm");
  PointwiseLq pw(prm.q, f.points());
  for (int j = 0; j <= sys.J_max; ++j)
    pw.add(std::pow(2.0, double(j) * prm.s), plane_mag(F, sys.phi[std::size_t(j)]));
  return lp_norm_field(f.grid(), pw.finish(), prm.p);
}

double local_means_norm(const GridFunction& f, const LocalMeansKernels& kern,
                        const SpaceParams& prm) {
  if (!(2.0 * double(kern.N_mom()) > prm.s))
    fail(errc::invalid_argument, "local_means_norm: 2*N_mom > s violated");
  GridFunction F = transform_forward(f);
  int J_stop = max_dyadic_level(f.grid()) + 4;
  double term0 = lp_norm_field(f.grid(), plane_mag(F, kern.symbol_k0()), prm.p);
  if (prm.family == Family::B) {
    LqAccum acc{prm.q};
    double top = 0.0;
    for (int j = 1; j <= J_stop; ++j) {
      double term = std::pow(2.0, double(j) * prm.s) *
                    lp_norm_field(f.grid(), plane_mag(F, kern.symbol_kN(j)), prm.p);
      acc.add(term);
      top = std::max(top, term);
      if (j > 2 && term < 1e-14 * top) break;
    }
    return term0 + acc.value();
  }
  if (prm.p == kInf) fail(errc::invalid_argument, "local_means_norm: family F requires p < infinity");
  PointwiseLq pw(prm.q, f.points());
  double top = 0.0;
  for (int j = 1; j <= J_stop; ++j) {
    auto mag = plane_mag(F, kern.symbol_kN(j));
    double w = std::pow(2.0, double(j) * prm.s);
    pw.add(w, mag);
    double rough = w * simd::active().max(mag.data(), mag.size());
    top = std::max(top, rough);
    if (j > 2 && rough < 1e-14 * top) break;
  }
  return term0 + lp_norm_field(f.grid(), pw.finish(), prm.p);
}

PeetrePair make_peetre_pair(int S) {
  if (S < 0) fail(errc::invalid_argument, "make_peetre_pair: S must be >= 0");
  int R = S / 2 + 1; // 2R - 1 >= S
  // Width 2 keeps the physical-space duals concentrated well inside the torus
  // period, so the lattice moment screening stays far below its tolerance.
  // The annulus symbol is normalized to unit peak (at r^2 = 4R).
  double peak = std::pow(4.0 * double(R), double(R)) * std::exp(-double(R));
  Multiplier Psi =
      Multiplier::radial([](double r) { return std::exp(-0.25 * r * r); }, "Psi_gauss");
  Multiplier psi = Multiplier::radial(
      [R, peak](double r) {
        double r2 = r * r;
        double mono = 1.0;
        for (int i = 0; i < R; ++i) mono *= r2;
        return mono * std::exp(-0.25 * r2) / peak;
      },
      "psi_gauss_mom" + std::to_string(2 * R - 1));
  return PeetrePair{std::move(Psi), std::move(psi), 2 * R - 1};
}

namespace {

// Support and moment screening for the analyzer pair, epsilon = 1. The
// derivative conditions at 0 are checked through the lattice: the symbol's
// inverse transform is built once and its monomial moments equal the Taylor
// coefficients at the origin up to i-powers, which avoids the cancellation of
// finite differencing.
void validate_peetre_kernels(const Grid& g, const Multiplier& Psi, const Multiplier& psi,
                             double s) {
  for (std::size_t i = 0; i < g.points(); ++i) {
    auto xi = g.freq_at(i);
    double r = std::hypot(xi[0], xi[1]);
    if (r < 2.0 && std::abs(Psi(xi)) <= 0.0)
      fail(errc::invalid_kernel, "peetre_norm: |Psi| vanishes inside {|xi| < 2}");
    if (r > 0.5 && r < 2.0 && std::abs(psi(xi)) <= 0.0)
      fail(errc::invalid_kernel, "peetre_norm: |psi| vanishes on the annulus {1/2 < |xi| < 2}");
  }
  int S = int(std::floor(std::max(s, 0.0)));
  GridFunction symbol_plane = GridFunction::from_scalar(g, [&](const std::array<double, 2>&) {
    return cplx(0, 0);
  });
  {
    std::vector<std::vector<cplx>> spec(1, std::vector<cplx>(g.points()));
    for (std::size_t i = 0; i < g.points(); ++i) spec[0][i] = psi(g.freq_at(i));
    symbol_plane = GridFunction::from_spectrum(g, ValueSpace::euclidean(1), std::move(spec));
  }
  double cell = std::pow(g.h(), double(g.n));
  double norm_fac = std::pow(2.0 * kPi_, -0.5 * double(g.n));
  for (int a0 = 0; a0 <= S; ++a0)
    for (int a1 = 0; a1 <= (g.n == 2 ? S - a0 : 0); ++a1) {
      if (a0 + a1 > S) continue;
      cplx mom(0, 0);
      for (std::size_t i = 0; i < g.points(); ++i) {
        auto x = g.point(i);
        double w = std::pow(x[0], double(a0)) * (g.n == 2 ? std::pow(x[1], double(a1)) : 1.0);
        mom += w * symbol_plane.plane(0)[i];
      }
      double deriv = std::abs(mom) * cell * norm_fac;
      if (deriv > 1e-8)
        fail(errc::invalid_kernel,
             "peetre_norm: psi derivative at 0 of order (" + std::to_string(a0) + "," +
                 std::to_string(a1) + ") = " + std::to_string(deriv) + " exceeds 1e-8");
    }
}

} // namespace

double peetre_norm(const GridFunction& f, const Multiplier& Psi, const Multiplier& psi,
                   const SpaceParams& prm) {
  double a_min = prm.family == Family::B ? (prm.p == kInf ? 0.0 : double(prm.n) / prm.p)
                                         : double(prm.n) / std::min(prm.p, prm.q);
  if (!(prm.a > a_min))
    fail(errc::invalid_argument,
         prm.family == Family::B ? "peetre_norm: a > n/p violated"
                                 : "peetre_norm: a > n/min(p,q) violated");
  if (prm.family == Family::F && prm.p == kInf)
    fail(errc::invalid_argument, "peetre_norm: family F requires p < infinity");
  validate_peetre_kernels(f.grid(), Psi, psi, prm.s);

  GridFunction F = transform_forward(f);
  int J_stop = max_dyadic_level(f.grid()) + 4;
  double term0 =
      lp_norm_field(f.grid(), peetre_maximal(F, Psi, 0, prm.a).magnitude_field(), prm.p);
  if (prm.family == Family::B) {
    LqAccum acc{prm.q};
    double top = 0.0;
    for (int j = 1; j <= J_stop; ++j) {
      double term =
          std::pow(2.0, double(j) * prm.s) *
          lp_norm_field(f.grid(), peetre_maximal(F, psi, j, prm.a).magnitude_field(), prm.p);
      acc.add(term);
      top = std::max(top, term);
      if (j > 2 && term < 1e-14 * top) break;
    }
    return term0 + acc.value();
  }
  PointwiseLq pw(prm.q, f.points());
  double top = 0.0;
  for (int j = 1; j <= J_stop; ++j) {
    auto field = peetre_maximal(F, psi, j, prm.a).magnitude_field();
    double w = std::pow(2.0, double(j) * prm.s);
    pw.add(w, field);
    double rough = w * simd::active().max(field.data(), field.size());
    top = std::max(top, rough);
    if (j > 2 && rough < 1e-14 * top) break;
  }
  return term0 + lp_norm_field(f.grid(), pw.finish(), prm.p);
}

Multiplier harmonic_window() {
  return Multiplier::radial(
      [](double r) {
        if (r <= 1.0) return 1.0;
        if (r >= 1.5) return 0.0;
        return 1.0 - smooth_step(2.0 * (r - 1.0));
      },
      "harmonic_window");
}

namespace {

double harmonic_norm_once(const GridFunction& F, const SpaceParams& prm, const Multiplier& phi,
                          int gauss_order, int t_levels) {
  const Grid& g = F.grid();
  int k = prm.k_poisson;
  double term0 = lp_norm_field(g, plane_mag(F, phi), prm.p);
  const GaussRule& rule = GaussRule::of_order(std::size_t(gauss_order));

  if (prm.family == Family::B) {
    LqAccum acc{prm.q};
    for (int nu = 0; nu <= t_levels; ++nu) {
      Panel panel = map_rule(rule, std::ldexp(1.0, -nu - 1), std::ldexp(1.0, -nu));
      for (std::size_t i = 0; i < panel.t.size(); ++i) {
        double t = panel.t[i];
        double np = lp_norm_field(g, plane_mag(F, poisson_multiplier(t, k)), prm.p);
        if (prm.q == kInf)
          acc.add(std::pow(t, double(k) - prm.s) * np);
        else
          acc.acc += panel.w[i] * std::pow(t, (double(k) - prm.s) * prm.q - 1.0) *
                     std::pow(np, prm.q);
      }
    }
    return term0 + acc.value();
  }

  PointwiseLq pw(prm.q, g.points());
  for (int nu = 0; nu <= t_levels; ++nu) {
    Panel panel = map_rule(rule, std::ldexp(1.0, -nu - 1), std::ldexp(1.0, -nu));
    for (std::size_t i = 0; i < panel.t.size(); ++i) {
      double t = panel.t[i];
      auto mag = plane_mag(F, poisson_multiplier(t, k));
      if (prm.q == kInf)
        pw.add(std::pow(t, double(k) - prm.s), mag);
      else
        pw.add_pow(panel.w[i] * std::pow(t, (double(k) - prm.s) * prm.q - 1.0), mag);
    }
  }
  return term0 + lp_norm_field(g, pw.finish(), prm.p);
}

} // namespace

double harmonic_norm(const GridFunction& f, const SpaceParams& prm, const Multiplier& phi,
                     const HarmonicOptions& opts) {
  if (prm.family == Family::F && prm.p == kInf)
    fail(errc::invalid_argument, "harmonic_norm: family F requires p < infinity");
  if (prm.k_poisson < 1) fail(errc::invalid_argument, "harmonic_norm: k_poisson >= 1 violated");
  GridFunction F = transform_forward(f);
  int t_levels = opts.t_levels >= 0 ? opts.t_levels : max_dyadic_level(f.grid());
  double v = harmonic_norm_once(F, prm, phi, opts.gauss_order, t_levels);
  if (opts.verify_quadrature) {
    double v2 = harmonic_norm_once(F, prm, phi, 2 * opts.gauss_order, t_levels);
    double denom = std::max(std::abs(v), std::abs(v2));
    if (denom > 0.0 && std::abs(v - v2) / denom > 1e-6)
      fail(errc::quadrature_failure,
           "harmonic_norm: panel quadrature not converged (order " +
               std::to_string(opts.gauss_order) + " vs " + std::to_string(2 * opts.gauss_order) +
               " differ by " + std::to_string(std::abs(v - v2) / denom) + ")");
    return v2;
  }
  return v;
}

GridFunction lift(const GridFunction& f, double sigma) {
  return apply_multiplier(
      f, Multiplier::radial(
             [sigma](double r) { return std::pow(1.0 + r * r, 0.5 * sigma); },
             "lift_" + std::to_string(sigma)));
}

double seq_norm_b(const CoefficientField& lam, double p, double q) {
  if (!(p > 0.0) || !(q > 0.0)) fail(errc::invalid_argument, "seq_norm_b: p, q must be positive");
  LqAccum outer{q};
  for (const auto& [nu, entries] : lam.levels) {
    LqAccum inner{p};
    for (const auto& [m, v] : entries) inner.add(std::abs(v));
    outer.add(inner.value());
  }
  return outer.value();
}

namespace {

// Per-axis assignment of grid samples to level-nu cubes; contiguous index
// ranges except for the wrap at cube 0.
struct AxisCubes {
  std::vector<std::uint64_t> cube_of; // sample -> cube index
  std::vector<std::vector<std::size_t>> members;
};

AxisCubes axis_cubes(const Grid& g, int nu, int T_int) {
  AxisCubes ac;
  std::uint64_t M = std::uint64_t(T_int) << nu;
  ac.cube_of.resize(g.N);
  ac.members.assign(M, {});
  double scale = std::ldexp(1.0, nu);
  for (std::size_t i = 0; i < g.N; ++i) {
    double y = g.coord(i) + 0.5 * g.T; // [0, T)
    std::uint64_t m = std::uint64_t(std::llround(std::floor(y * scale + 0.5))) % M;
    ac.cube_of[i] = m;
    ac.members[m].push_back(i);
  }
  return ac;
}

} // namespace

double seq_norm_f(const CoefficientField& lam, double p, double q, const Grid& grid) {
  if (!(p > 0.0) || !(q > 0.0)) fail(errc::invalid_argument, "seq_norm_f: p, q must be positive");
  double T_round = std::round(grid.T);
  if (std::abs(grid.T - T_round) > 1e-12 || int(T_round) != lam.T_int)
    fail(errc::invalid_argument, "seq_norm_f: grid period does not match the coefficient lattice");
  if (grid.n != lam.n) fail(errc::invalid_argument, "seq_norm_f: dimension mismatch");
  if (std::ldexp(1.0, -lam.nu_max) < 4.0 * grid.h())
    fail(errc::resolution_too_small,
         "seq_norm_f: grid does not resolve level-nu_max cubes (need >= 4 samples per side)");

  const std::size_t P = grid.points();
  std::vector<double> acc(P, 0.0);
  double cell = std::pow(grid.h(), double(grid.n));
  for (const auto& [nu, entries] : lam.levels) {
    if (entries.empty()) continue;
    AxisCubes ax = axis_cubes(grid, nu, lam.T_int);
    std::uint64_t M = std::uint64_t(lam.T_int) << nu;
    for (const auto& [mflat, v] : entries) {
      double lam_abs = std::abs(v);
      if (lam_abs == 0.0) continue;
      std::uint64_t m0 = grid.n == 1 ? mflat : mflat / M;
      std::uint64_t m1 = grid.n == 1 ? 0 : mflat % M;
      const auto& rows = ax.members[m0];
      std::size_t count = grid.n == 1 ? rows.size() : rows.size() * ax.members[m1].size();
      if (count == 0)
        fail(errc::resolution_too_small, "seq_norm_f: empty cube at level " + std::to_string(nu));
      double mass = double(count) * cell;
      double chi = p == kInf ? 1.0 : std::pow(mass, -1.0 / p); // L_p-normalized indicator
      double contrib = lam_abs * chi;
      auto bump_cell = [&](std::size_t idx) {
        if (q == kInf)
          acc[idx] = std::max(acc[idx], contrib);
        else
          acc[idx] += std::pow(contrib, q);
      };
      if (grid.n == 1) {
        for (std::size_t i : rows) bump_cell(i);
      } else {
        for (std::size_t i0 : rows)
          for (std::size_t i1 : ax.members[m1]) bump_cell(i0 * grid.N + i1);
      }
    }
  }
  if (q != kInf)
    for (auto& vv : acc) vv = std::pow(vv, 1.0 / q);
  return lp_norm_field(grid, acc, p);
}

// ---------------------------------------------------------------------------

const char* norm_tag_name(NormTag t) {
  switch (t) {
    case NormTag::besov: return "besov";
    case NormTag::triebel: return "triebel";
    case NormTag::local_means: return "local_means";
    case NormTag::peetre: return "peetre";
    case NormTag::harmonic: return "harmonic";
  }
  return "?";
}

std::optional<NormTag> norm_tag_from_name(const std::string& s) {
  for (NormTag t : {NormTag::besov, NormTag::triebel, NormTag::local_means, NormTag::peetre,
                    NormTag::harmonic})
    if (s == norm_tag_name(t)) return t;
  return std::nullopt;
}

NormToolbox NormToolbox::make(const Grid& grid, int J_max, int N_mom, int peetre_S) {
  if (J_max < 0) J_max = max_dyadic_level(grid);
  return NormToolbox{grid,
                     build_dyadic_system(grid, J_max),
                     build_local_means(grid, N_mom),
                     make_peetre_pair(peetre_S),
                     harmonic_window(),
                     HarmonicOptions{}};
}

NormReport compare_norms(const GridFunction& f, const SpaceParams& prm,
                         const std::vector<NormTag>& tags, const NormToolbox& tb) {
  bool nonzero = false;
  for (int c = 0; c < f.dim() && !nonzero; ++c)
    for (const auto& z : f.plane(c))
      if (z != cplx(0, 0)) {
        nonzero = true;
        break;
      }
  if (!nonzero) fail(errc::degenerate_input, "compare_norms: input function is identically zero");

  FunctionAnalysis an(tb, f);
  NormReport rep;
  for (NormTag t : tags) rep.values.emplace_back(t, an.norm(prm, t));
  rep.ratios.resize(tags.size() * tags.size(), 1.0);
  for (std::size_t i = 0; i < tags.size(); ++i)
    for (std::size_t j = 0; j < tags.size(); ++j)
      rep.ratios[i * tags.size() + j] = rep.values[i].second / rep.values[j].second;
  return rep;
}

FunctionAnalysis::FunctionAnalysis(const NormToolbox& tb, const GridFunction& f)
    : tb_(tb), f_(transform_forward(f)) {}

const std::vector<double>& FunctionAnalysis::besov_plane(int j) {
  auto it = besov_mag_.find(j);
  if (it == besov_mag_.end())
    it = besov_mag_.emplace(j, plane_mag(f_, tb_.sys.phi[std::size_t(j)])).first;
  return it->second;
}

const std::vector<double>& FunctionAnalysis::lm_plane(int j) {
  auto it = lm_mag_.find(j);
  if (it == lm_mag_.end())
    it = lm_mag_
             .emplace(j, plane_mag(f_, j == 0 ? tb_.lm.symbol_k0() : tb_.lm.symbol_kN(j)))
             .first;
  return it->second;
}

const std::vector<double>& FunctionAnalysis::peetre_plane(int j, double a) {
  long akey = std::lround(a * 1024.0);
  auto key = std::make_pair(j, akey);
  auto it = peetre_.find(key);
  if (it == peetre_.end()) {
    const Multiplier& ker = j == 0 ? tb_.peetre.Psi : tb_.peetre.psi;
    it = peetre_.emplace(key, peetre_maximal(f_, ker, j, a).magnitude_field()).first;
  }
  return it->second;
}

std::vector<FunctionAnalysis::HarmNode>& FunctionAnalysis::harm_planes(int k) {
  auto it = harm_nodes_.find(k);
  if (it != harm_nodes_.end()) return it->second;
  std::vector<HarmNode> nodes;
  const GaussRule& rule = GaussRule::of_order(std::size_t(tb_.harm_opts.gauss_order));
  int t_levels = tb_.harm_opts.t_levels >= 0 ? tb_.harm_opts.t_levels : tb_.sys.J_max;
  for (int nu = 0; nu <= t_levels; ++nu) {
    Panel panel = map_rule(rule, std::ldexp(1.0, -nu - 1), std::ldexp(1.0, -nu));
    for (std::size_t i = 0; i < panel.t.size(); ++i) {
      HarmNode node;
      node.t = panel.t[i];
      node.w = panel.w[i];
      node.mag = plane_mag(f_, poisson_multiplier(node.t, k));
      nodes.push_back(std::move(node));
    }
  }
  return harm_nodes_.emplace(k, std::move(nodes)).first->second;
}

double FunctionAnalysis::norm(const SpaceParams& prm, NormTag tag) {
  const Grid& g = tb_.grid;
  switch (tag) {
    case NormTag::besov: {
      check_band_coverage(g, f_.spectrum(), tb_.sys.J_max, "besov_norm");
      LqAccum acc{prm.q};
      for (int j = 0; j <= tb_.sys.J_max; ++j)
        acc.add(std::pow(2.0, double(j) * prm.s) * lp_norm_field(g, besov_plane(j), prm.p));
      return acc.value();
    }
    case NormTag::triebel: {
      if (prm.p == kInf) fail(errc::invalid_argument, "triebel_norm: p = infinity not admissible");
      check_band_coverage(g, f_.spectrum(), tb_.sys.J_max, "triebel_norm");
      PointwiseLq pw(prm.q, f_.points());
      for (int j = 0; j <= tb_.sys.J_max; ++j)
        pw.add(std::pow(2.0, double(j) * prm.s), besov_plane(j));
      return lp_norm_field(g, pw.finish(), prm.p);
    }
    case NormTag::local_means: {
      if (!(2.0 * double(tb_.lm.N_mom()) > prm.s))
        fail(errc::invalid_argument, "local_means_norm: 2*N_mom > s violated");
      int J_stop = tb_.sys.J_max + 2;
      double term0 = lp_norm_field(g, lm_plane(0), prm.p);
      if (prm.family == Family::B) {
        LqAccum acc{prm.q};
        for (int j = 1; j <= J_stop; ++j)
          acc.add(std::pow(2.0, double(j) * prm.s) * lp_norm_field(g, lm_plane(j), prm.p));
        return term0 + acc.value();
      }
      PointwiseLq pw(prm.q, f_.points());
      for (int j = 1; j <= J_stop; ++j) pw.add(std::pow(2.0, double(j) * prm.s), lm_plane(j));
      return term0 + lp_norm_field(g, pw.finish(), prm.p);
    }
    case NormTag::peetre: {
      double a_min = prm.family == Family::B ? (prm.p == kInf ? 0.0 : double(prm.n) / prm.p)
                                             : double(prm.n) / std::min(prm.p, prm.q);
      double a = a_min + 0.5;
      int J_stop = tb_.sys.J_max + 2;
      double term0 = lp_norm_field(g, peetre_plane(0, a), prm.p);
      if (prm.family == Family::B) {
        LqAccum acc{prm.q};
        for (int j = 1; j <= J_stop; ++j)
          acc.add(std::pow(2.0, double(j) * prm.s) * lp_norm_field(g, peetre_plane(j, a), prm.p));
        return term0 + acc.value();
      }
      PointwiseLq pw(prm.q, f_.points());
      for (int j = 1; j <= J_stop; ++j)
        pw.add(std::pow(2.0, double(j) * prm.s), peetre_plane(j, a));
      return term0 + lp_norm_field(g, pw.finish(), prm.p);
    }
    case NormTag::harmonic: {
      int k = prm.k_poisson;
      auto& nodes = harm_planes(k);
      int pkey = prm.p == kInf ? -1 : int(std::lround(prm.p * 1024.0));
      auto it0 = harm_term0_p_.find(pkey);
      if (it0 == harm_term0_p_.end())
        it0 = harm_term0_p_
                  .emplace(pkey, lp_norm_field(g, plane_mag(f_, tb_.harm_phi), prm.p))
                  .first;
      double term0 = it0->second;
      if (prm.family == Family::B) {
        LqAccum acc{prm.q};
        for (auto& node : nodes) {
          if (node.lp_cache_p != prm.p) {
            node.lp_cache = lp_norm_field(g, node.mag, prm.p);
            node.lp_cache_p = prm.p;
          }
          if (prm.q == kInf)
            acc.add(std::pow(node.t, double(k) - prm.s) * node.lp_cache);
          else
            acc.acc += node.w * std::pow(node.t, (double(k) - prm.s) * prm.q - 1.0) *
                       std::pow(node.lp_cache, prm.q);
        }
        return term0 + acc.value();
      }
      PointwiseLq pw(prm.q, f_.points());
      for (const auto& node : nodes) {
        if (prm.q == kInf)
          pw.add(std::pow(node.t, double(k) - prm.s), node.mag);
        else
          pw.add_pow(node.w * std::pow(node.t, (double(k) - prm.s) * prm.q - 1.0), node.mag);
      }
      return term0 + lp_norm_field(g, pw.finish(), prm.p);
    }
  }
  fail(errc::internal_inconsistency, "norm: unknown tag");
}

} // namespace bk

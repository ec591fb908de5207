#include "besovkit/decomposition.hpp"

#include <algorithm>
#include <cmath>

#include "besovkit/fft.hpp"
#include "besovkit/quadrature.hpp"
#include "besovkit/simd.hpp"

namespace bk {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= double(i);
  return f;
}

int integer_period(const Grid& g, const char* who) {
  double r = std::round(g.T);
  if (std::abs(g.T - r) > 1e-12 || r < 1.0)
    fail(errc::invalid_argument,
         std::string(who) + ": decomposition lattices require an integer period T");
  return int(r);
}

// per-axis grid index range covering |x - center| <= radius (torus)
struct AxisRange {
  std::size_t start = 0;
  std::size_t count = 0;
};

AxisRange axis_range(const Grid& g, double center, double radius) {
  AxisRange r;
  if (2.0 * radius >= g.T - g.h()) {
    r.start = 0;
    r.count = g.N;
    return r;
  }
  double lo = center - radius, hi = center + radius;
  long ilo = (long)std::ceil((lo + 0.5 * g.T) / g.h() - 1e-12);
  long ihi = (long)std::floor((hi + 0.5 * g.T) / g.h() + 1e-12);
  if (ihi < ilo) {
    r.count = 0;
    return r;
  }
  r.count = std::size_t(ihi - ilo + 1);
  long N = long(g.N);
  r.start = std::size_t(((ilo % N) + N) % N);
  if (r.count > g.N) r.count = g.N;
  return r;
}

} // namespace

double harmonic_boundary_coeff(int k, int l) {
  if (l < 0 || l >= k) fail(errc::invalid_argument, "harmonic_boundary_coeff: need 0 <= l < k");
  return (l % 2 == 0 ? 1.0 : -1.0) / factorial(l);
}

double harmonic_integral_coeff(int k) {
  if (k < 1) fail(errc::invalid_argument, "harmonic_integral_coeff: k >= 1 required");
  return (k % 2 == 0 ? 1.0 : -1.0) / factorial(k - 1);
}

// ---------------------------------------------------------------------------
// Atom storage

std::array<double, 2> Atom::center() const {
  double step = std::ldexp(1.0, -nu);
  return {-0.5 * grid.T + step * double(m[0]), grid.n == 2 ? -0.5 * grid.T + step * double(m[1]) : 0.0};
}

GridFunction Atom::materialize() const {
  GridFunction out(grid, space);
  accumulate_into(out, cplx(1, 0));
  return out;
}

void Atom::accumulate_into(GridFunction& target, cplx weight) const {
  if (!(target.grid() == grid)) fail(errc::invalid_argument, "atom accumulate: grid mismatch");
  if (!(target.space() == space)) fail(errc::invalid_argument, "atom accumulate: value-space mismatch");
  const std::size_t N = grid.N;
  for (int c = 0; c < space.dim; ++c) {
    auto& plane = target.plane(c);
    const auto& src = samples[std::size_t(c)];
    if (grid.n == 1) {
      for (std::size_t i = 0; i < extent[0]; ++i)
        plane[(start[0] + i) % N] += weight * src[i];
    } else {
      for (std::size_t i0 = 0; i0 < extent[0]; ++i0)
        for (std::size_t i1 = 0; i1 < extent[1]; ++i1)
          plane[((start[0] + i0) % N) * N + (start[1] + i1) % N] +=
              weight * src[i0 * extent[1] + i1];
    }
  }
}

namespace {

// Build an atom by evaluating a callback on the support box.
// eval(flat_grid_index, component) -> value
template <typename F>
Atom build_atom(const Grid& g, const ValueSpace& space, int nu, std::array<std::uint64_t, 2> m,
                double d, Atom::Kind kind, int K, int L, F&& eval) {
  Atom a;
  a.nu = nu;
  a.m = m;
  a.kind = kind;
  a.K = K;
  a.L = L;
  a.d = d;
  a.grid = g;
  a.space = space;
  double radius = d * std::ldexp(1.0, -nu - 1);
  auto c = a.center();
  AxisRange r0 = axis_range(g, c[0], radius);
  AxisRange r1 = g.n == 2 ? axis_range(g, c[1], radius) : AxisRange{0, 1};
  a.start = {r0.start, r1.start};
  a.extent = {r0.count, g.n == 2 ? r1.count : 1};
  a.samples.assign(std::size_t(space.dim),
                   std::vector<cplx>(a.extent[0] * a.extent[1], cplx(0, 0)));
  const std::size_t N = g.N;
  for (int comp = 0; comp < space.dim; ++comp)
    for (std::size_t i0 = 0; i0 < a.extent[0]; ++i0)
      for (std::size_t i1 = 0; i1 < a.extent[1]; ++i1) {
        std::size_t flat = g.n == 1 ? (r0.start + i0) % N
                                    : ((r0.start + i0) % N) * N + (r1.start + i1) % N;
        a.samples[std::size_t(comp)][i0 * a.extent[1] + i1] = eval(flat, comp);
      }
  return a;
}

} // namespace

Atom make_atom(const GridFunction& dense, int nu, std::array<std::uint64_t, 2> m, double d,
               Atom::Kind kind, int K, int L) {
  return build_atom(dense.grid(), dense.space(), nu, m, d, kind, K, L,
                    [&](std::size_t flat, int comp) { return dense.plane(comp)[flat]; });
}

// ---------------------------------------------------------------------------
// atom validation

AtomConditionReport validate_atom(const Atom& a, const SpaceParams& prm) {
  AtomConditionReport rep;
  const Grid& g = a.grid;
  GridFunction dense = a.materialize();
  auto mag = dense.magnitude_field();

  // support
  double box_r = a.d * std::ldexp(1.0, -a.nu - 1);
  auto c = a.center();
  double leak = 0.0;
  for (std::size_t i = 0; i < g.points(); ++i) {
    auto x = g.point(i);
    bool inside = std::abs(g.wrap_delta(x[0] - c[0])) <= box_r + 1e-12;
    if (g.n == 2) inside = inside && std::abs(g.wrap_delta(x[1] - c[1])) <= box_r + 1e-12;
    if (!inside) leak = std::max(leak, mag[i]);
  }
  rep.support_leak = leak;
  rep.support_ok = leak < 1e-10;

  // derivative bounds via spectral differentiation
  double base = a.kind == Atom::Kind::one_K
                    ? 1.0
                    : std::pow(2.0, -double(a.nu) * (prm.s - double(prm.n) / prm.p));
  GridFunction spec = transform_forward(dense);
  for (int a0 = 0; a0 <= a.K; ++a0) {
    int a1max = g.n == 2 ? a.K - a0 : 0;
    for (int a1 = 0; a1 <= a1max; ++a1) {
      int order = a0 + a1;
      if (order > a.K) continue;
      Multiplier der{[a0, a1](const std::array<double, 2>& xi) {
                       cplx v(1, 0);
                       for (int i = 0; i < a0; ++i) v *= cplx(0, xi[0]);
                       for (int i = 0; i < a1; ++i) v *= cplx(0, xi[1]);
                       return v;
                     },
                     "D^alpha"};
      double sup = lp_norm_field(g, apply_multiplier(spec, der).magnitude_field(), kInf);
      double bound = a.kind == Atom::Kind::one_K
                         ? 1.0
                         : base * std::pow(2.0, double(order) * double(a.nu));
      rep.deriv_ratio.push_back(bound > 0 ? sup / bound : 0.0);
    }
  }
  rep.max_deriv_ratio = 0.0;
  for (double r : rep.deriv_ratio) rep.max_deriv_ratio = std::max(rep.max_deriv_ratio, r);
  rep.derivs_ok = rep.max_deriv_ratio <= 1.0 + 1e-8;

  // moments (centered monomials), only for L >= 0
  if (a.L >= 0) {
    double cell = std::pow(g.h(), double(g.n));
    for (int b0 = 0; b0 <= a.L; ++b0) {
      int b1max = g.n == 2 ? a.L - b0 : 0;
      for (int b1 = 0; b1 <= b1max; ++b1) {
        if (b0 + b1 > a.L) continue;
        cplx acc(0, 0);
        for (std::size_t i = 0; i < g.points(); ++i) {
          if (mag[i] == 0.0) continue;
          auto x = g.point(i);
          double w0 = g.wrap_delta(x[0] - c[0]);
          double w1 = g.n == 2 ? g.wrap_delta(x[1] - c[1]) : 0.0;
          double mono = std::pow(w0, double(b0)) * (g.n == 2 ? std::pow(w1, double(b1)) : 1.0);
          acc += mono * dense.plane(0)[i];
        }
        // moment of the first component is representative for unit-direction atoms
        rep.moment_residual.push_back(std::abs(acc) * cell);
      }
    }
    for (double r : rep.moment_residual)
      rep.max_moment_residual = std::max(rep.max_moment_residual, r);
    rep.moments_ok = rep.max_moment_residual < 1e-8;
  } else {
    rep.moments_ok = true;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// harmonic machinery

namespace {

struct TSample {
  double t = 0.0;
  double w = 0.0; // quadrature weight; 0 for sup-only samples
  std::vector<double> mag;
};

// Spectral evaluation of analysis planes on the level-nu center lattice
// (fold modulo M, then a length-M inverse DFT per axis).
struct CenterEvaluator {
  const Grid& g;
  std::uint64_t M;

  std::vector<cplx> eval(const std::vector<cplx>& spec,
                         const std::function<cplx(const std::array<double, 2>&)>& symbol) const {
    const std::size_t N = g.N;
    double norm = std::pow(2.0 * kPi / g.T, double(g.n)) *
                  std::pow(2.0 * kPi, -0.5 * double(g.n));
    if (g.n == 1) {
      std::vector<cplx> fold(M, cplx(0, 0));
      for (std::size_t b = 0; b < N; ++b) {
        long kap = b < N / 2 ? long(b) : long(b) - long(N);
        cplx v = spec[b] * symbol(g.freq_at(b));
        double sgn = (kap % 2 == 0) ? 1.0 : -1.0;
        std::uint64_t r = std::uint64_t(((kap % long(M)) + long(M)) % long(M));
        fold[r] += sgn * v;
      }
      std::vector<cplx> out(M);
      fft::bluestein(fold.data(), out.data(), M, +1);
      for (auto& z : out) z *= norm;
      return out;
    }
    std::vector<cplx> fold(M * M, cplx(0, 0));
    for (std::size_t b0 = 0; b0 < N; ++b0) {
      long k0 = b0 < N / 2 ? long(b0) : long(b0) - long(N);
      std::uint64_t r0 = std::uint64_t(((k0 % long(M)) + long(M)) % long(M));
      double s0 = (k0 % 2 == 0) ? 1.0 : -1.0;
      for (std::size_t b1 = 0; b1 < N; ++b1) {
        long k1 = b1 < N / 2 ? long(b1) : long(b1) - long(N);
        std::uint64_t r1 = std::uint64_t(((k1 % long(M)) + long(M)) % long(M));
        double s1 = (k1 % 2 == 0) ? 1.0 : -1.0;
        cplx v = spec[b0 * N + b1] * symbol(g.freq_at(b0 * N + b1));
        fold[r0 * M + r1] += s0 * s1 * v;
      }
    }
    // inverse DFT rows then columns
    std::vector<cplx> tmp(M), out_row(M);
    for (std::uint64_t r0 = 0; r0 < M; ++r0) {
      fft::bluestein(fold.data() + r0 * M, out_row.data(), M, +1);
      std::copy(out_row.begin(), out_row.end(), fold.begin() + long(r0 * M));
    }
    std::vector<cplx> out(M * M);
    std::vector<cplx> col(M);
    for (std::uint64_t c = 0; c < M; ++c) {
      for (std::uint64_t r = 0; r < M; ++r) col[r] = fold[r * M + c];
      fft::bluestein(col.data(), tmp.data(), M, +1);
      for (std::uint64_t r = 0; r < M; ++r) out[r * M + c] = tmp[r] * norm;
    }
    return out;
  }
};

struct HarmonicMachine {
  const Grid& g;
  const GridFunction F; // with spectrum
  SpaceParams prm;
  const PartitionWindow& window;
  DecomposeOptions opts;
  int T_int;
  int k;
  double c_int;
  std::vector<double> c_l;
  double fmax = 0.0;

  HarmonicMachine(const GridFunction& f, const SpaceParams& p, const PartitionWindow& w,
                  const DecomposeOptions& o)
      : g(f.grid()), F(transform_forward(f)), prm(p), window(w), opts(o),
        T_int(integer_period(f.grid(), "harmonic_decompose")), k(p.k_poisson),
        c_int(harmonic_integral_coeff(p.k_poisson)) {
    double thresh = double(prm.n) / double(prm.n + 1);
    if (!(prm.p > thresh))
      fail(errc::invalid_argument, "harmonic_decompose: p > n/(n+1) violated");
    if (!(prm.s > prm.sigma()))
      fail(errc::invalid_argument,
           prm.family == Family::B ? "harmonic_decompose: s > sigma_p violated"
                                   : "harmonic_decompose: s > sigma_pq violated");
    if (prm.mu < 2) fail(errc::invalid_argument, "harmonic_decompose: mu >= kappa_0 = 2 violated");
    if (opts.nu_max < prm.mu)
      fail(errc::invalid_argument, "harmonic_decompose: nu_max >= mu violated");
    for (int l = 0; l < k; ++l) c_l.push_back(harmonic_boundary_coeff(k, l));
    auto mag = F.magnitude_field();
    fmax = simd::active().max(mag.data(), mag.size());
  }

  // magnitude planes of d^k_t u at the quadrature + margin samples of level nu
  std::vector<TSample> level_samples(int nu) const {
    std::vector<TSample> out;
    double t_lo = std::ldexp(1.0, prm.mu - nu);
    double t_hi = 2.0 * t_lo;
    const GaussRule& rule = GaussRule::of_order(std::size_t(opts.gauss_order));
    int pieces = 1 << prm.mu;
    double dt = std::ldexp(1.0, -nu);
    for (int l = 0; l < pieces; ++l) {
      Panel panel = map_rule(rule, t_lo + l * dt, t_lo + (l + 1) * dt);
      for (std::size_t i = 0; i < panel.t.size(); ++i)
        out.push_back(TSample{panel.t[i], panel.w[i], {}});
    }
    double d = window.d();
    for (int i = 1; i <= opts.margin_t_samples; ++i) {
      double fr = double(i) / double(opts.margin_t_samples);
      out.push_back(TSample{t_lo * std::pow(1.0 / d, fr), 0.0, {}});
      out.push_back(TSample{t_hi * std::pow(d, fr), 0.0, {}});
    }
    for (auto& s : out)
      s.mag = apply_multiplier(F, poisson_multiplier(s.t, k)).magnitude_field();
    return out;
  }

  // sup over the coefficient box of level nu around cube m
  double box_sup(const std::vector<TSample>& samples, int nu, std::uint64_t m0, std::uint64_t m1,
                 double y_radius) const {
    double step = std::ldexp(1.0, -nu);
    std::array<double, 2> c{-0.5 * g.T + step * double(m0),
                            g.n == 2 ? -0.5 * g.T + step * double(m1) : 0.0};
    AxisRange r0 = axis_range(g, c[0], y_radius);
    AxisRange r1 = g.n == 2 ? axis_range(g, c[1], y_radius) : AxisRange{0, 1};
    double best = 0.0;
    for (std::size_t i0 = 0; i0 < r0.count; ++i0) {
      double x0 = g.coord((r0.start + i0) % g.N);
      double d0 = g.wrap_delta(x0 - c[0]);
      for (std::size_t i1 = 0; i1 < r1.count; ++i1) {
        double d1 = 0.0;
        std::size_t flat;
        if (g.n == 1) {
          flat = (r0.start + i0) % g.N;
        } else {
          std::size_t col = (r1.start + i1) % g.N;
          d1 = g.wrap_delta(g.coord(col) - c[1]);
          flat = ((r0.start + i0) % g.N) * g.N + col;
        }
        if (d0 * d0 + d1 * d1 > y_radius * y_radius + 1e-15) continue;
        for (const auto& s : samples) best = std::max(best, s.mag[flat]);
      }
    }
    return best;
  }
};

} // namespace

AtomicRepresentation harmonic_decompose(const GridFunction& f, const SpaceParams& prm,
                                        const PartitionWindow& window,
                                        const DecomposeOptions& opts) {
  HarmonicMachine hm(f, prm, window, opts);
  const Grid& g = f.grid();
  double d = window.d();
  int mu = prm.mu;
  int k = hm.k;

  AtomicRepresentation rep;
  rep.prm = prm;
  rep.mu = mu;
  rep.d = d;
  rep.grid = g;
  rep.space = f.space();
  rep.coefficients = CoefficientField::make(g.n, hm.T_int);

  bool f_zero = hm.fmax == 0.0;
  double lam_total = 0.0;

  // boundary level nu = mu: atoms carry sum_l c_l d^l_t u(., 1)
  {
    std::uint64_t M = rep.coefficients.axis_count(mu);
    double scale = std::ldexp(1.0, mu);

    std::vector<GridFunction> bound_planes;
    for (int l = 0; l < k; ++l) bound_planes.push_back(apply_multiplier(hm.F, poisson_multiplier(1.0, l)));
    GridFunction B = GridFunction::zero(g, f.space());
    for (int l = 0; l < k; ++l) {
      for (int c = 0; c < f.dim(); ++c)
        simd::active().caxpy(B.plane(c).data(), cplx(hm.c_l[std::size_t(l)], 0.0),
                             bound_planes[std::size_t(l)].plane(c).data(), g.points());
    }

    // sup samples over t in [1/(2d), 3d/2] per derivative order
    std::vector<std::vector<TSample>> sup_samples{std::size_t(k)};
    for (int l = 0; l < k; ++l) {
      double t0 = 1.0 / (2.0 * d), t1 = 1.5 * d;
      for (int i = 0; i < 8; ++i) {
        double t = t0 * std::pow(t1 / t0, double(i) / 7.0);
        TSample s;
        s.t = t;
        s.mag = apply_multiplier(hm.F, poisson_multiplier(t, l)).magnitude_field();
        sup_samples[std::size_t(l)].push_back(std::move(s));
      }
    }

    std::uint64_t M1 = g.n == 2 ? M : 1;
    for (std::uint64_t m0 = 0; m0 < M; ++m0)
      for (std::uint64_t m1 = 0; m1 < M1; ++m1) {
        double lam = 0.0;
        for (int l = 0; l < k; ++l)
          lam += std::abs(hm.c_l[std::size_t(l)]) *
                 hm.box_sup(sup_samples[std::size_t(l)], mu, m0, m1, d);
        if (lam == 0.0) continue;
        lam_total += lam;
        rep.coefficients.set(mu, m0, m1, lam);
        double inv_lam = 1.0 / lam;
        std::array<double, 2> c{-0.5 * g.T + double(m0) / scale,
                                g.n == 2 ? -0.5 * g.T + double(m1) / scale : 0.0};
        rep.atoms.push_back(build_atom(
            g, f.space(), mu, {m0, m1}, d, Atom::Kind::sp_KL, prm.K, -1,
            [&](std::size_t flat, int comp) {
              auto x = g.point(flat);
              double u0 = scale * g.wrap_delta(x[0] - c[0]);
              double w = window.psi1(u0);
              if (g.n == 2) w *= window.psi1(scale * g.wrap_delta(x[1] - c[1]));
              return cplx(inv_lam * w, 0.0) * B.plane(comp)[flat];
            }));
      }
  }

  // interior levels nu > mu: atoms carry c * int t^{k-1} d^k_t u dt over the panel
  for (int nu = mu + 1; nu <= opts.nu_max; ++nu) {
    auto samples = hm.level_samples(nu);
    GridFunction J = GridFunction::zero(g, f.space());
    for (const auto& s : samples) {
      if (s.w == 0.0) continue;
      GridFunction plane = apply_multiplier(hm.F, poisson_multiplier(s.t, k));
      cplx wgt(s.w * std::pow(s.t, double(k - 1)), 0.0);
      for (int c = 0; c < f.dim(); ++c)
        simd::active().caxpy(J.plane(c).data(), wgt, plane.plane(c).data(), g.points());
    }

    std::uint64_t M = rep.coefficients.axis_count(nu);
    std::uint64_t M1 = g.n == 2 ? M : 1;
    double scale = std::ldexp(1.0, nu);
    double y_radius = d * std::ldexp(1.0, -nu + mu - 1);
    double lam_sc = std::pow(2.0, double(nu) * (prm.s - double(prm.n) / prm.p)) *
                    std::pow(2.0, -double(nu) * double(k));
    for (std::uint64_t m0 = 0; m0 < M; ++m0)
      for (std::uint64_t m1 = 0; m1 < M1; ++m1) {
        double sup = hm.box_sup(samples, nu, m0, m1, y_radius);
        double lam = lam_sc * sup;
        if (lam == 0.0) continue;
        lam_total += lam;
        rep.coefficients.set(nu, m0, m1, lam);
        double inv_lam = hm.c_int / lam;
        std::array<double, 2> c{-0.5 * g.T + double(m0) / scale,
                                g.n == 2 ? -0.5 * g.T + double(m1) / scale : 0.0};
        rep.atoms.push_back(build_atom(
            g, f.space(), nu, {m0, m1}, d, Atom::Kind::sp_KL, prm.K, -1,
            [&](std::size_t flat, int comp) {
              auto x = g.point(flat);
              double u0 = scale * g.wrap_delta(x[0] - c[0]);
              double w = window.psi1(u0);
              if (g.n == 2) w *= window.psi1(scale * g.wrap_delta(x[1] - c[1]));
              return cplx(inv_lam * w, 0.0) * J.plane(comp)[flat];
            }));
      }
  }

  if (!f_zero && lam_total == 0.0)
    fail(errc::internal_inconsistency,
         "harmonic_decompose: nonzero input produced an all-zero coefficient field");
  return rep;
}

GridFunction reconstruct_atomic(const AtomicRepresentation& rep) {
  GridFunction out = GridFunction::zero(rep.grid, rep.space);
  std::size_t idx = 0;
  for (const auto& [nu, entries] : rep.coefficients.levels)
    for (const auto& [mflat, lam] : entries) {
      if (idx >= rep.atoms.size())
        fail(errc::internal_inconsistency, "reconstruct_atomic: atom/coefficient misalignment");
      rep.atoms[idx].accumulate_into(out, lam);
      ++idx;
    }
  if (idx != rep.atoms.size())
    fail(errc::internal_inconsistency, "reconstruct_atomic: atom/coefficient misalignment");
  return out;
}

double synthesis_bound_check(const AtomicRepresentation& rep, const NormToolbox& tb) {
  if (rep.coefficients.empty())
    fail(errc::degenerate_input, "synthesis_bound_check: zero coefficient field");
  GridFunction recon = reconstruct_atomic(rep);
  double space_norm = rep.prm.family == Family::B ? besov_norm(recon, tb.sys, rep.prm)
                                                  : triebel_norm(recon, tb.sys, rep.prm);
  double coeff_norm = rep.prm.family == Family::B
                          ? seq_norm_b(rep.coefficients, rep.prm.p, rep.prm.q)
                          : seq_norm_f(rep.coefficients, rep.prm.p, rep.prm.q, recon.grid());
  return space_norm / coeff_norm;
}

// ---------------------------------------------------------------------------
// quark decomposition

namespace {

std::vector<std::array<int, 2>> gamma_indices(int n, int gamma_max) {
  std::vector<std::array<int, 2>> out;
  if (n == 1) {
    for (int gdeg = 0; gdeg <= gamma_max; ++gdeg) out.push_back({gdeg, 0});
  } else {
    for (int gdeg = 0; gdeg <= gamma_max; ++gdeg)
      for (int g0 = gdeg; g0 >= 0; --g0) out.push_back({g0, gdeg - g0});
  }
  return out;
}

// exact integral of (t - t_l)^beta t^{k-1} over [t_l, t_l + dt]
double subpanel_moment(double t_l, double dt, int beta, int k) {
  const GaussRule& rule = GaussRule::of_order(8); // exact: degree beta + k - 1 <= 15
  Panel p = map_rule(rule, t_l, t_l + dt);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.t.size(); ++i)
    acc += p.w[i] * std::pow(p.t[i] - t_l, double(beta)) * std::pow(p.t[i], double(k - 1));
  return acc;
}

} // namespace

bool QuarkRepresentation::empty() const {
  for (const auto& pg : per_gamma)
    if (!pg.rho.coeff.empty() || !pg.lam.coeff.empty()) return false;
  return true;
}

QuarkRepresentation quark_decompose(const GridFunction& f, const SpaceParams& prm,
                                    const PartitionWindow& window, int gamma_max,
                                    const DecomposeOptions& opts) {
  HarmonicMachine hm(f, prm, window, opts);
  const Grid& g = f.grid();
  const int mu = prm.mu;
  const int k = hm.k;
  const double d = window.d();
  const int n = g.n;
  const int dcomp = f.dim();

  QuarkRepresentation rep;
  rep.prm = prm;
  rep.gamma_max = gamma_max;
  rep.M_smooth = prm.s; // single-branch case: lam-branch only, L = -1
  rep.L = -1;
  rep.mu = mu;
  rep.d = d;
  auto gammas = gamma_indices(n, gamma_max);
  rep.per_gamma.resize(gammas.size());
  for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
    rep.per_gamma[gi].gamma = gammas[gi];
    rep.per_gamma[gi].rho.coeff = CoefficientField::make(n, hm.T_int);
    rep.per_gamma[gi].lam.coeff = CoefficientField::make(n, hm.T_int);
  }

  if (hm.fmax == 0.0) return rep;

  const auto& spec = hm.F.spectrum();

  for (int nu = mu; nu <= opts.nu_max; ++nu) {
    // reproduce the harmonic coefficients of this level
    std::uint64_t M = std::uint64_t(hm.T_int) << nu;
    std::uint64_t M1 = n == 2 ? M : 1;
    CenterEvaluator ce{g, M};
    double lam_sc = std::pow(2.0, double(nu) * (prm.s - double(prm.n) / prm.p)) *
                    std::pow(2.0, -double(nu) * double(k));
    double y_radius = nu == mu ? d : d * std::ldexp(1.0, -nu + mu - 1);

    std::vector<double> lam_field(std::size_t(M * M1), 0.0);
    if (nu == mu) {
      std::vector<std::vector<TSample>> sup_samples{std::size_t(k)};
      for (int l = 0; l < k; ++l) {
        double t0 = 1.0 / (2.0 * d), t1 = 1.5 * d;
        for (int i = 0; i < 8; ++i) {
          double t = t0 * std::pow(t1 / t0, double(i) / 7.0);
          TSample s;
          s.t = t;
          s.mag = apply_multiplier(hm.F, poisson_multiplier(t, l)).magnitude_field();
          sup_samples[std::size_t(l)].push_back(std::move(s));
        }
      }
      for (std::uint64_t m0 = 0; m0 < M; ++m0)
        for (std::uint64_t m1 = 0; m1 < M1; ++m1) {
          double lam = 0.0;
          for (int l = 0; l < k; ++l)
            lam += std::abs(hm.c_l[std::size_t(l)]) *
                   hm.box_sup(sup_samples[std::size_t(l)], mu, m0, m1, y_radius);
          lam_field[std::size_t(m0 * M1 + m1)] = lam;
        }
    } else {
      auto samples = hm.level_samples(nu);
      for (std::uint64_t m0 = 0; m0 < M; ++m0)
        for (std::uint64_t m1 = 0; m1 < M1; ++m1)
          lam_field[std::size_t(m0 * M1 + m1)] =
              lam_sc * hm.box_sup(samples, nu, m0, m1, y_radius);
    }

    // Taylor data: center values of the mixed derivatives, per component
    // key: (alpha0, alpha1, beta, subpanel)
    int pieces = nu == mu ? 1 : (1 << mu);
    double t_lo = std::ldexp(1.0, mu - nu);
    double dt = std::ldexp(1.0, -nu);

    // D[alpha,beta][piece][component][centerflat] for the interior levels
    std::map<std::array<int, 3>, std::vector<std::vector<std::vector<cplx>>>> derivs;
    if (nu > mu) {
      for (const auto& gmi : gammas) {
        int total = gmi[0] + gmi[1];
        int beta_max = gamma_max - total;
        for (int beta = 0; beta <= beta_max; ++beta) {
          std::array<int, 3> key{gmi[0], gmi[1], beta};
          if (derivs.count(key)) continue;
          auto& per_piece = derivs[key];
          per_piece.resize(std::size_t(pieces));
          for (int l = 0; l < pieces; ++l) {
            double t_c = t_lo + double(l) * dt;
            int tord = k + beta;
            per_piece[std::size_t(l)].resize(std::size_t(dcomp));
            for (int comp = 0; comp < dcomp; ++comp) {
              per_piece[std::size_t(l)][std::size_t(comp)] = ce.eval(
                  spec[std::size_t(comp)], [&](const std::array<double, 2>& xi) {
                    double r = std::hypot(xi[0], xi[1]);
                    cplx v(1, 0);
                    for (int i = 0; i < gmi[0]; ++i) v *= cplx(0, xi[0]);
                    for (int i = 0; i < gmi[1]; ++i) v *= cplx(0, xi[1]);
                    double sgn = tord % 2 == 0 ? 1.0 : -1.0;
                    return v * (sgn * std::pow(r, double(tord)) * std::exp(-t_c * r));
                  });
            }
          }
        }
      }
    }

    // subpanel Taylor moments, shared by every cube of the level
    std::vector<std::vector<double>> moments{std::size_t(pieces)};
    if (nu > mu)
      for (int l = 0; l < pieces; ++l) {
        double t_l = t_lo + double(l) * dt;
        for (int beta = 0; beta <= gamma_max; ++beta)
          moments[std::size_t(l)].push_back(subpanel_moment(t_l, dt, beta, k));
      }

    // boundary level needs d_x^alpha d_t^l u(., 1) for each l < k
    std::map<std::array<int, 3>, std::vector<std::vector<cplx>>> bderivs;
    if (nu == mu) {
      for (const auto& gmi : gammas)
        for (int l = 0; l < k; ++l) {
          std::array<int, 3> key{gmi[0], gmi[1], l};
          auto& per_comp = bderivs[key];
          per_comp.resize(std::size_t(dcomp));
          for (int comp = 0; comp < dcomp; ++comp)
            per_comp[std::size_t(comp)] =
                ce.eval(spec[std::size_t(comp)], [&](const std::array<double, 2>& xi) {
                  double r = std::hypot(xi[0], xi[1]);
                  cplx v(1, 0);
                  for (int i = 0; i < gmi[0]; ++i) v *= cplx(0, xi[0]);
                  for (int i = 0; i < gmi[1]; ++i) v *= cplx(0, xi[1]);
                  double sgn = l % 2 == 0 ? 1.0 : -1.0;
                  return v * (sgn * std::pow(r, double(l)) * std::exp(-r));
                });
        }
    }

    double pos_sc = std::pow(2.0, double(nu) * (prm.s - double(prm.n) / prm.p));
    for (std::uint64_t m0 = 0; m0 < M; ++m0)
      for (std::uint64_t m1 = 0; m1 < M1; ++m1) {
        double lam = lam_field[std::size_t(m0 * M1 + m1)];
        if (lam == 0.0) continue;
        std::uint64_t cflat = m0 * M1 + m1;
        for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
          auto gm = gammas[gi];
          int total = gm[0] + gm[1];
          double gfact = factorial(gm[0]) * factorial(gm[1]);
          EVector eta = EVector::zero(dcomp);
          if (nu == mu) {
            for (int comp = 0; comp < dcomp; ++comp) {
              cplx acc(0, 0);
              for (int l = 0; l < k; ++l)
                acc += hm.c_l[std::size_t(l)] *
                       bderivs.at({gm[0], gm[1], l})[std::size_t(comp)][cflat];
              eta.c[std::size_t(comp)] =
                  acc / gfact * std::pow(2.0, -double(mu) * double(total)) * pos_sc / lam;
            }
          } else {
            int beta_max = gamma_max - total;
            for (int comp = 0; comp < dcomp; ++comp) {
              cplx acc(0, 0);
              for (int l = 0; l < pieces; ++l)
                for (int beta = 0; beta <= beta_max; ++beta)
                  acc += derivs.at({gm[0], gm[1], beta})[std::size_t(l)][std::size_t(comp)][cflat] /
                         (gfact * factorial(beta)) * moments[std::size_t(l)][std::size_t(beta)];
              eta.c[std::size_t(comp)] = hm.c_int * acc *
                                         std::pow(2.0, -double(nu) * double(total)) * pos_sc / lam;
            }
          }
          double eta_norm = e_norm(eta, f.space());
          if (eta_norm == 0.0) continue;
          double lam_gamma = lam * eta_norm;
          auto& branch = rep.per_gamma[gi].lam;
          branch.coeff.set(nu, m0, m1, lam_gamma);
          EVector dir = eta;
          for (auto& z : dir.c) z /= eta_norm;
          branch.dirs[{nu, branch.coeff.flat(nu, m0, m1)}] = std::move(dir);
        }
      }
  }

  // decay diagnostic
  double stat = 0.0;
  for (const auto& pg : rep.per_gamma) {
    double v = std::pow(2.0, double(mu) * double(pg.gamma[0] + pg.gamma[1])) *
               (seq_norm_b(pg.rho.coeff, prm.p, prm.q) + seq_norm_b(pg.lam.coeff, prm.p, prm.q));
    stat = std::max(stat, v);
  }
  rep.decay_stat = stat;

  if (opts.check_truncation && hm.fmax > 0.0) {
    GridFunction recon = reconstruct_quark(rep, g, window);
    GridFunction diff = recon;
    diff -= f;
    double err = lp_norm(diff, 2.0) / lp_norm(f, 2.0);
    if (err > opts.truncation_threshold && gamma_max >= 2) {
      GridFunction recon_lo = reconstruct_quark_capped(rep, g, window, gamma_max - 2);
      GridFunction diff_lo = recon_lo;
      diff_lo -= f;
      double err_lo = lp_norm(diff_lo, 2.0) / lp_norm(f, 2.0);
      if (err > 0.9 * err_lo)
        fail(errc::truncation_failure,
             "quark_decompose: residual " + std::to_string(err) + " above threshold " +
                 std::to_string(opts.truncation_threshold) + " and not decreasing in Gamma");
    }
  }
  return rep;
}

namespace {

// (-Laplacian)^P of prod_i u_i^{gamma_i} psi1(u_i), evaluated via the window's
// derivative tables. P <= 2.
double laplacian_power_profile(const PartitionWindow& w, int n, std::array<int, 2> gamma, int P,
                               double u0, double u1) {
  if (P == 0) {
    double v = w.monomial_profile_deriv(u0, gamma[0], 0);
    if (n == 2) v *= w.monomial_profile_deriv(u1, gamma[1], 0);
    return v;
  }
  if (P == 1) {
    if (n == 1) return -w.monomial_profile_deriv(u0, gamma[0], 2);
    return -(w.monomial_profile_deriv(u0, gamma[0], 2) * w.monomial_profile_deriv(u1, gamma[1], 0) +
             w.monomial_profile_deriv(u0, gamma[0], 0) * w.monomial_profile_deriv(u1, gamma[1], 2));
  }
  if (P == 2) {
    if (n == 1) return w.monomial_profile_deriv(u0, gamma[0], 4);
    return w.monomial_profile_deriv(u0, gamma[0], 4) * w.monomial_profile_deriv(u1, gamma[1], 0) +
           2.0 * w.monomial_profile_deriv(u0, gamma[0], 2) *
               w.monomial_profile_deriv(u1, gamma[1], 2) +
           w.monomial_profile_deriv(u0, gamma[0], 0) * w.monomial_profile_deriv(u1, gamma[1], 4);
  }
  fail(errc::invalid_argument, "quark profiles with (L+1)/2 > 2 are not supported");
}

void accumulate_branch(GridFunction& out, const QuarkRepresentation::Branch& br,
                       const PartitionWindow& window, std::array<int, 2> gamma, double smooth,
                       int P, double p, int gamma_cap) {
  if (gamma[0] + gamma[1] > gamma_cap) return;
  const Grid& g = out.grid();
  for (const auto& [nu, entries] : br.coeff.levels) {
    double scale = std::ldexp(1.0, nu);
    double step = 1.0 / scale;
    double norm_fac = std::pow(2.0, -double(nu) * (smooth - double(g.n) / p));
    std::uint64_t M = br.coeff.axis_count(nu);
    std::uint64_t M1 = g.n == 2 ? M : 1;
    double radius = 0.5 * window.d() * step;
    for (const auto& [mflat, lam] : entries) {
      auto dit = br.dirs.find({nu, mflat});
      if (dit == br.dirs.end())
        fail(errc::internal_inconsistency, "reconstruct_quark: missing direction vector");
      const EVector& dir = dit->second;
      std::uint64_t m0 = g.n == 1 ? mflat : mflat / M1;
      std::uint64_t m1 = g.n == 1 ? 0 : mflat % M1;
      std::array<double, 2> c{-0.5 * g.T + step * double(m0),
                              g.n == 2 ? -0.5 * g.T + step * double(m1) : 0.0};
      AxisRange r0 = axis_range(g, c[0], radius);
      AxisRange r1 = g.n == 2 ? axis_range(g, c[1], radius) : AxisRange{0, 1};
      for (std::size_t i0 = 0; i0 < r0.count; ++i0) {
        std::size_t gi0 = (r0.start + i0) % g.N;
        double u0 = scale * g.wrap_delta(g.coord(gi0) - c[0]);
        for (std::size_t i1 = 0; i1 < r1.count; ++i1) {
          std::size_t flat;
          double u1 = 0.0;
          if (g.n == 1) {
            flat = gi0;
          } else {
            std::size_t gi1 = (r1.start + i1) % g.N;
            u1 = scale * g.wrap_delta(g.coord(gi1) - c[1]);
            flat = gi0 * g.N + gi1;
          }
          double quark = norm_fac * laplacian_power_profile(window, g.n, gamma, P, u0, u1);
          if (quark == 0.0) continue;
          cplx w = lam * quark;
          for (int comp = 0; comp < out.dim(); ++comp)
            out.plane(comp)[flat] += w * dir.c[std::size_t(comp)];
        }
      }
    }
  }
}

} // namespace

GridFunction reconstruct_quark_capped(const QuarkRepresentation& rep, const Grid& grid,
                                      const PartitionWindow& window, int gamma_cap) {
  int dcomp = 1;
  for (const auto& pg : rep.per_gamma) {
    for (const auto& [key, dir] : pg.rho.dirs) dcomp = std::max(dcomp, dir.dim());
    for (const auto& [key, dir] : pg.lam.dirs) dcomp = std::max(dcomp, dir.dim());
  }
  GridFunction out = GridFunction::zero(grid, ValueSpace::euclidean(dcomp));
  int P = rep.L == -1 ? 0 : (rep.L + 1) / 2;
  for (const auto& pg : rep.per_gamma) {
    accumulate_branch(out, pg.rho, window, pg.gamma, rep.M_smooth, 0, rep.prm.p, gamma_cap);
    accumulate_branch(out, pg.lam, window, pg.gamma, rep.prm.s, P, rep.prm.p, gamma_cap);
  }
  return out;
}

GridFunction reconstruct_quark(const QuarkRepresentation& rep, const Grid& grid,
                               const PartitionWindow& window) {
  return reconstruct_quark_capped(rep, grid, window, rep.gamma_max);
}

QuarkRepresentation quark_decompose_general(const GridFunction& f, const SpaceParams& prm, int M,
                                            const PartitionWindow& window, int gamma_max,
                                            const DecomposeOptions& opts) {
  double sigma = prm.sigma();
  if (!(double(M) > sigma && double(M) > prm.s))
    fail(errc::invalid_argument, "quark_decompose_general: M > sigma and M > s violated");
  int L = prm.L;
  if (!(L == -1 || (L >= 1 && (L + 1) % 2 == 0)))
    fail(errc::invalid_argument, "quark_decompose_general: (L+1)/2 must be a nonnegative integer");
  if (!(double(L) >= std::floor(sigma - prm.s)))
    fail(errc::invalid_argument, "quark_decompose_general: L >= floor(sigma - s) violated");

  if (L == -1) {
    if (!(prm.s > sigma))
      fail(errc::invalid_argument, "quark_decompose_general: L = -1 requires s > sigma");
    return quark_decompose(f, prm, window, gamma_max, opts);
  }
  if (L != 1)
    fail(errc::invalid_argument,
         "quark_decompose_general: the lift/Laplacian splitting is implemented for L in {-1, 1}");

  // f = g_m + (-Laplacian)(g_1 + ... + g_m), g_{i+1} = lift(g_i, -(L+1))
  int m_iter = std::max(1, int(std::ceil((double(M) - prm.s) / double(L + 1))));
  DecomposeOptions sub_opts = opts;
  sub_opts.check_truncation = false;

  std::vector<GridFunction> gs;
  GridFunction cur = f;
  for (int i = 0; i < m_iter; ++i) {
    cur = lift(cur, -double(L + 1));
    gs.push_back(cur);
  }
  GridFunction f2 = gs[0];
  for (int i = 1; i < m_iter; ++i) f2 += gs[std::size_t(i)];
  const GridFunction& f1 = gs.back();

  SpaceParams prm1 = prm.with_s(double(M));
  SpaceParams prm2 = prm.with_s(prm.s + double(L + 1));
  QuarkRepresentation rep1 = quark_decompose(f1, prm1, window, gamma_max, sub_opts);
  QuarkRepresentation rep2 = quark_decompose(f2, prm2, window, gamma_max, sub_opts);

  QuarkRepresentation rep;
  rep.prm = prm;
  rep.gamma_max = gamma_max;
  rep.M_smooth = double(M);
  rep.L = L;
  rep.mu = prm.mu;
  rep.d = window.d();
  rep.per_gamma.resize(rep1.per_gamma.size());
  for (std::size_t gi = 0; gi < rep1.per_gamma.size(); ++gi) {
    rep.per_gamma[gi].gamma = rep1.per_gamma[gi].gamma;
    rep.per_gamma[gi].rho = rep1.per_gamma[gi].lam; // (M,p)_{-1}-branch
    rep.per_gamma[gi].lam = rep2.per_gamma[gi].lam; // becomes (s,p)_L after -Laplacian
  }
  double stat = 0.0;
  for (const auto& pg : rep.per_gamma) {
    double v = std::pow(2.0, double(rep.mu) * double(pg.gamma[0] + pg.gamma[1])) *
               (seq_norm_b(pg.rho.coeff, prm.p, prm.q) + seq_norm_b(pg.lam.coeff, prm.p, prm.q));
    stat = std::max(stat, v);
  }
  rep.decay_stat = stat;

  if (opts.check_truncation) {
    GridFunction recon = reconstruct_quark(rep, f.grid(), window);
    GridFunction diff = recon;
    diff -= f;
    double err = lp_norm(diff, 2.0) / std::max(lp_norm(f, 2.0), 1e-300);
    if (err > opts.truncation_threshold && gamma_max >= 2) {
      GridFunction rl = reconstruct_quark_capped(rep, f.grid(), window, gamma_max - 2);
      rl -= f;
      double err_lo = lp_norm(rl, 2.0) / std::max(lp_norm(f, 2.0), 1e-300);
      if (err > 0.9 * err_lo)
        fail(errc::truncation_failure,
             "quark_decompose_general: residual " + std::to_string(err) +
                 " not decreasing in Gamma");
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// convergence diagnostics

namespace {

ConvergenceReport tails_from_level_norms(std::vector<int> levels, std::vector<double> norms) {
  ConvergenceReport rep;
  rep.levels = std::move(levels);
  rep.level_norms = std::move(norms);
  rep.tails.resize(rep.level_norms.size());
  double run = 0.0;
  for (std::size_t i = rep.level_norms.size(); i-- > 0;) {
    run += rep.level_norms[i];
    rep.tails[i] = run;
  }
  // geometric fit on the positive tails: log2 tail ~ alpha - kappa*nu
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < rep.tails.size(); ++i)
    if (rep.tails[i] > 0.0) pts.emplace_back(double(rep.levels[i]), std::log2(rep.tails[i]));
  if (pts.size() <= 1) {
    rep.kappa_est = kInf;
    return rep;
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    if (pts[i + 1].second > pts[i].second + 1e-12)
      fail(errc::convergence_failure, "convergence_check: tails are not decreasing");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  double nn = double(pts.size());
  double slope = (nn * sxy - sx * sy) / (nn * sxx - sx * sx);
  rep.kappa_est = -slope;
  return rep;
}

void check_konv_preconditions(const SpaceParams& prm, int L) {
  if (prm.K < 1 + int(std::floor(prm.s)))
    fail(errc::invalid_argument, "convergence_check: K >= 1 + floor(s) violated");
  if (L < int(std::floor(prm.sigma() - prm.s)))
    fail(errc::invalid_argument, "convergence_check: L >= floor(sigma - s) violated");
}

} // namespace

ConvergenceReport convergence_check(const AtomicRepresentation& rep) {
  int L = rep.atoms.empty() ? rep.prm.L : rep.atoms.front().L;
  check_konv_preconditions(rep.prm, L);
  std::vector<int> levels;
  std::vector<double> norms;
  if (rep.atoms.empty()) return tails_from_level_norms(levels, norms);
  std::size_t idx = 0;
  for (const auto& [nu, entries] : rep.coefficients.levels) {
    GridFunction level_sum = GridFunction::zero(rep.grid, rep.space);
    for (const auto& [mflat, lam] : entries) {
      rep.atoms[idx].accumulate_into(level_sum, lam);
      ++idx;
    }
    levels.push_back(nu);
    norms.push_back(lp_norm(level_sum, 2.0));
  }
  return tails_from_level_norms(levels, norms);
}

ConvergenceReport convergence_check(const QuarkRepresentation& rep, const Grid& grid,
                                    const PartitionWindow& window) {
  check_konv_preconditions(rep.prm, rep.L);
  int P = rep.L == -1 ? 0 : (rep.L + 1) / 2;
  int dcomp = 1;
  for (const auto& pg : rep.per_gamma) {
    for (const auto& [key, dir] : pg.rho.dirs) dcomp = std::max(dcomp, dir.dim());
    for (const auto& [key, dir] : pg.lam.dirs) dcomp = std::max(dcomp, dir.dim());
  }
  std::map<int, GridFunction> sums;
  for (const auto& pg : rep.per_gamma) {
    for (const auto* br : {&pg.rho, &pg.lam}) {
      bool is_rho = br == &pg.rho;
      for (const auto& [nu, entries] : br->coeff.levels) {
        if (entries.empty()) continue;
        auto it = sums.find(nu);
        if (it == sums.end())
          it = sums.emplace(nu, GridFunction::zero(grid, ValueSpace::euclidean(dcomp))).first;
        // single-level slice of this branch
        QuarkRepresentation::Branch slice;
        slice.coeff = CoefficientField::make(br->coeff.n, br->coeff.T_int);
        for (const auto& [mflat, lam] : entries) {
          slice.coeff.levels[nu][mflat] = lam;
          slice.coeff.nu_max = std::max(slice.coeff.nu_max, nu);
          auto dit = br->dirs.find({nu, mflat});
          if (dit != br->dirs.end()) slice.dirs[{nu, mflat}] = dit->second;
        }
        accumulate_branch(it->second, slice, window, pg.gamma,
                          is_rho ? rep.M_smooth : rep.prm.s, is_rho ? 0 : P, rep.prm.p,
                          rep.gamma_max);
      }
    }
  }
  std::vector<int> levels;
  std::vector<double> norms;
  for (auto& [nu, fn] : sums) {
    levels.push_back(nu);
    norms.push_back(lp_norm(fn, 2.0));
  }
  return tails_from_level_norms(levels, norms);
}

} // namespace bk

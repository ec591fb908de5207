#include "besovkit/kernels.hpp"

#include <cmath>

#include "besovkit/fft.hpp"

namespace bk {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  double a = std::exp(-1.0 / t);
  double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

namespace {

// Derivatives of the base bump B(v) = exp(-1/(1-v^2)^alpha) through the
// polynomial recurrence B^{(k)} = P_k(v) (1-v^2)^{-(alpha+1)k} B(v),
// P_{k+1} = (P_k'(1-v^2) + 2(alpha+1)k v P_k)(1-v^2)^alpha - 2 alpha v P_k.
// Spectral differentiation is avoided here: the xi^{2q} factors amplify FFT
// round-off far above the moment tolerances.
struct BumpCalculus {
  int alpha;
  std::vector<std::vector<double>> P;

  explicit BumpCalculus(int alpha_, int kmax) : alpha(alpha_) {
    auto deriv = [](const std::vector<double>& p) {
      std::vector<double> d(p.size() > 1 ? p.size() - 1 : 1, 0.0);
      for (std::size_t i = 1; i < p.size(); ++i) d[i - 1] = double(i) * p[i];
      return d;
    };
    auto mul = [](const std::vector<double>& a, const std::vector<double>& b) {
      std::vector<double> c(a.size() + b.size() - 1, 0.0);
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
      return c;
    };
    auto add = [](std::vector<double> a, const std::vector<double>& b) {
      if (a.size() < b.size()) a.resize(b.size(), 0.0);
      for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
      return a;
    };
    std::vector<double> one{1.0};
    std::vector<double> w{1.0, 0.0, -1.0};   // 1 - v^2
    std::vector<double> walpha = one;
    for (int i = 0; i < alpha; ++i) walpha = mul(walpha, w);
    P.push_back(one);
    for (int k = 0; k < kmax; ++k) {
      std::vector<double> inner =
          add(mul(deriv(P.back()), w),
              mul(mul({0.0, 2.0 * double(alpha + 1) * double(k)}, P.back()), one));
      std::vector<double> t1 = mul(inner, walpha);
      std::vector<double> t3 = mul({0.0, -2.0 * double(alpha)}, P.back());
      P.push_back(add(t1, t3));
    }
  }

  double eval(int k, double v) const {
    double w = 1.0 - v * v;
    if (w <= 0.0) return 0.0;
    double B = std::exp(-1.0 / std::pow(w, double(alpha)));
    if (B == 0.0) return 0.0; // underflow region: the true value is below 1e-300
    const auto& p = P[std::size_t(k)];
    double horner = 0.0;
    for (std::size_t i = p.size(); i-- > 0;) horner = horner * v + p[i];
    return horner * std::pow(w, -double(alpha + 1) * double(k)) * B;
  }
};

const BumpCalculus& bump_calculus(int alpha) {
  static BumpCalculus bc1(1, 8);
  static BumpCalculus bc2(2, 8);
  if (alpha == 1) return bc1;
  if (alpha == 2) return bc2;
  fail(errc::invalid_argument, "bump_calculus: order must be 1 or 2");
}

// k-th derivative of u -> B(u / u_scale)
double scaled_bump_deriv(double u, double u_scale, int k, int alpha) {
  return bump_calculus(alpha).eval(k, u / u_scale) / std::pow(u_scale, double(k));
}

} // namespace

double bump_rho(double r) {
  if (r <= 1.0) return 1.0;
  if (r >= 2.0) return 0.0;
  return 1.0 - smooth_step(r - 1.0);
}

int max_dyadic_level(const Grid& grid) {
  int J = 0;
  while (std::ldexp(1.0, J + 2) < grid.max_freq()) ++J;
  return J;
}

DyadicSystem build_dyadic_system(const Grid& grid, int J_max) {
  if (J_max < 1) fail(errc::invalid_argument, "build_dyadic_system: J_max must be >= 1");
  if (!(std::ldexp(1.0, J_max + 1) < grid.max_freq()))
    fail(errc::resolution_too_small,
         "build_dyadic_system: annulus 2^{J_max+1} exceeds the frequency lattice (need "
         "2^{J_max+1} < pi*N/T)");
  DyadicSystem sys;
  sys.J_max = J_max;
  sys.phi.reserve(std::size_t(J_max) + 1);
  sys.phi.push_back(Multiplier::radial([](double r) { return bump_rho(r); }, "phi_0"));
  for (int j = 1; j <= J_max; ++j) {
    double s = std::ldexp(1.0, -j);
    sys.phi.push_back(Multiplier::radial(
        [s](double r) { return bump_rho(s * r) - bump_rho(2.0 * s * r); },
        "phi_" + std::to_string(j)));
  }
  return sys;
}

// ---------------------------------------------------------------------------
// local means

namespace {

// 1D bump supported on |u| <= u_max, positive inside, C^inf. Second-order
// glue: the transform tail then decays fast enough that the dyadic response
// envelope stays balanced over the analysis range.
double axis_bump(double u, double u_max) {
  double v = u / u_max;
  double w = 1.0 - v * v;
  if (w <= 0.0) return 0.0;
  return std::exp(-1.0 / (w * w));
}

} // namespace

LocalMeansKernels::LocalMeansKernels(const Grid& grid, int N_mom)
    : grid_(grid), N_mom_(N_mom),
      k0_(GridFunction::zero(grid, ValueSpace::euclidean(1))),
      k0_base_(GridFunction::zero(grid, ValueSpace::euclidean(1))),
      kN_(GridFunction::zero(grid, ValueSpace::euclidean(1))) {
  if (N_mom < 1) fail(errc::invalid_argument, "build_local_means: N_mom must be >= 1");
  double u_max = 1.0 / std::sqrt(double(grid.n));
  if (grid.h() * 4.0 > u_max)
    fail(errc::resolution_too_small, "build_local_means: grid does not resolve the unit-ball bump");

  auto b1 = [u_max](double u) { return axis_bump(u, u_max); };

  // 1D support samples for direct transform evaluation
  auto sup = std::make_shared<std::vector<std::pair<double, double>>>();
  for (std::size_t i = 0; i < grid.N; ++i) {
    double x = grid.coord(i);
    double v = b1(x);
    if (v != 0.0) sup->emplace_back(x, v);
  }
  support_ = sup;

  // Normalize so the analyzer responses are O(1): the k0 symbol is 1 at the
  // origin and the k^N annulus response peaks at 1. Scalar multiples keep
  // every kernel condition; without this the low- and high-frequency
  // envelopes differ by orders of magnitude and the equivalence ratios
  // spread accordingly.
  int N = N_mom;
  double sym0, anchor;
  {
    double v = bhat1(0.0).real();
    sym0 = grid.n == 2 ? v * v : v;
    double axis = grid.n == 1 ? 2.0 : 2.0 / std::sqrt(2.0);
    double m = bhat1(axis).real();
    double mag = grid.n == 2 ? std::abs(m * m) : std::abs(m);
    anchor = std::pow(2.0, 2.0 * double(N)) * mag; // response at the annulus center
  }
  k0_scale_ = 1.0 / sym0;
  kN_scale_ = 1.0 / anchor;

  k0_ = GridFunction::from_scalar(grid, [&](const std::array<double, 2>& x) {
    double v = b1(x[0]);
    if (grid.n == 2) v *= b1(x[1]);
    return cplx(v * k0_scale_, 0.0);
  });
  k0_base_ = GridFunction::from_scalar(grid, [&](const std::array<double, 2>& x) {
    double v = b1(x[0]);
    if (grid.n == 2) v *= b1(x[1]);
    return cplx(v * kN_scale_, 0.0);
  });

  // k^N = Laplacian^N k^0, computed spectrally (exact on the lattice).
  kN_ = apply_multiplier(k0_base_, Multiplier::radial(
                                       [N](double r) {
                                         double s = -(r * r);
                                         double acc = 1.0;
                                         for (int i = 0; i < N; ++i) acc *= s;
                                         return acc;
                                       },
                                       "(-|xi|^2)^N"));
}

double LocalMeansKernels::kN_moment(std::array<int, 2> beta) const {
  const std::size_t M1 = 8192;
  double h1 = fine_period_ / double(M1);
  double u_max = 1.0 / std::sqrt(double(grid_.n));
  // I(beta, q) = int u^beta b^{(2q)}(u) du, analytic derivative on a fine grid
  auto I = [&](int b, int q) {
    double acc = 0.0;
    for (std::size_t i = 0; i < M1; ++i) {
      double u = -0.5 * fine_period_ + h1 * double(i);
      if (std::abs(u) >= u_max) continue;
      acc += std::pow(u, double(b)) * scaled_bump_deriv(u, u_max, 2 * q, 2);
    }
    return acc * h1;
  };
  int N = N_mom_;
  if (grid_.n == 1) return kN_scale_ * I(beta[0], N);
  // Delta^N (b (x) b) = sum_j C(N, j) d^{2j} b (x) d^{2(N-j)} b
  double acc = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= N; ++j) {
    if (j > 0) binom = binom * double(N - j + 1) / double(j);
    acc += binom * I(beta[0], j) * I(beta[1], N - j);
  }
  return kN_scale_ * acc;
}

namespace {

cplx bhat1_impl(const std::vector<std::pair<double, double>>& support, double weight, double eta) {
  double re = 0.0, im = 0.0;
  for (const auto& [x, v] : support) {
    re += v * std::cos(eta * x);
    im -= v * std::sin(eta * x);
  }
  return cplx(weight * re, weight * im);
}

} // namespace

cplx LocalMeansKernels::bhat1(double eta) const {
  return bhat1_impl(*support_, grid_.h() / std::sqrt(2.0 * kPi), eta);
}

Multiplier LocalMeansKernels::symbol_k0() const {
  auto sup = support_;
  double w = grid_.h() / std::sqrt(2.0 * kPi);
  int n = grid_.n;
  double scale = k0_scale_;
  return Multiplier{[sup, w, n, scale](const std::array<double, 2>& xi) {
                      cplx v = bhat1_impl(*sup, w, xi[0]);
                      if (n == 2) v *= bhat1_impl(*sup, w, xi[1]);
                      return scale * v;
                    },
                    "k0_hat"};
}

Multiplier LocalMeansKernels::symbol_kN(int j) const {
  auto sup = support_;
  double w = grid_.h() / std::sqrt(2.0 * kPi);
  int n = grid_.n;
  int N = N_mom_;
  double s = std::ldexp(1.0, -j);
  double scale = kN_scale_;
  return Multiplier{[sup, w, n, N, s, scale](const std::array<double, 2>& xi) {
                      double e0 = s * xi[0], e1 = s * xi[1];
                      cplx v = bhat1_impl(*sup, w, e0);
                      double r2 = e0 * e0;
                      if (n == 2) {
                        v *= bhat1_impl(*sup, w, e1);
                        r2 += e1 * e1;
                      }
                      double fac = scale;
                      for (int i = 0; i < N; ++i) fac *= -r2;
                      return fac * v;
                    },
                    "kN_hat_j" + std::to_string(j)};
}

LocalMeansKernels build_local_means(const Grid& grid, int N_mom) {
  return LocalMeansKernels(grid, N_mom);
}

// ---------------------------------------------------------------------------
// Poisson extension

Multiplier poisson_multiplier(double t, int k) {
  if (!(t > 0.0)) fail(errc::invalid_argument, "poisson_multiplier: t must be positive");
  if (k < 0) fail(errc::invalid_argument, "poisson_multiplier: k must be >= 0");
  double sign = (k % 2 == 0) ? 1.0 : -1.0;
  return Multiplier::radial(
      [t, k, sign](double r) { return sign * std::pow(r, double(k)) * std::exp(-t * r); },
      "poisson(t=" + std::to_string(t) + ",k=" + std::to_string(k) + ")");
}

GridFunction poisson_extend(const GridFunction& f, double t, int k) {
  return apply_multiplier(f, poisson_multiplier(t, k));
}

// ---------------------------------------------------------------------------
// partition window

PartitionWindow::PartitionWindow(const Grid& grid, double d) : grid_(grid), d_(d) {
  if (!(d > 1.0 && d <= 2.0))
    fail(errc::invalid_argument, "build_partition_window: overlap d must lie in (1, 2]");
  if (double(grid.N) / grid.T < 8.0)
    fail(errc::resolution_too_small,
         "build_partition_window: need at least 8 samples per unit length");
  table_period_ = 4.0;   // quadrature window for the profile moments
  table_size_ = 16384;
}

double PartitionWindow::b(double u) const { return bump_calculus(1).eval(0, 2.0 * u / d_); }

double PartitionWindow::psi1(double u) const {
  double num = b(u);
  double den = 0.0;
  long base = std::lround(std::floor(u));
  for (long m = base - 2; m <= base + 2; ++m) den += b(u - double(m));
  return num / den;
}

double PartitionWindow::psi1_deriv(double u, int q) const {
  if (q < 0 || q > 8) fail(errc::invalid_argument, "psi1_deriv: order must be in [0,8]");
  if (q == 0) return psi1(u);
  if (std::abs(u) >= 0.5 * d_) return 0.0;
  // quotient recursion: psi^{(q)} = (b^{(q)} - sum_{j<q} C(q,j) psi^{(j)} den^{(q-j)}) / den
  double scale = 0.5 * d_;
  long base = std::lround(std::floor(u));
  std::array<double, 9> den{};
  for (int j = 0; j <= q; ++j)
    for (long m = base - 2; m <= base + 2; ++m)
      den[std::size_t(j)] += scaled_bump_deriv(u - double(m), scale, j, 1);
  std::array<double, 9> psi{};
  psi[0] = scaled_bump_deriv(u, scale, 0, 1) / den[0];
  for (int qq = 1; qq <= q; ++qq) {
    double acc = scaled_bump_deriv(u, scale, qq, 1);
    double binom = 1.0;
    for (int j = 0; j < qq; ++j) {
      // C(qq, j) with j running from 0
      if (j > 0) binom = binom * double(qq - j + 1) / double(j);
      acc -= binom * psi[std::size_t(j)] * den[std::size_t(qq - j)];
    }
    psi[std::size_t(qq)] = acc / den[0];
  }
  return psi[std::size_t(q)];
}

double PartitionWindow::psi(const std::array<double, 2>& x, int n) const {
  double v = psi1(x[0]);
  if (n == 2) v *= psi1(x[1]);
  return v;
}

double PartitionWindow::monomial_profile_deriv(double u, int gamma, int q) const {
  // (u^gamma psi1)^{(q)} by Leibniz; falling factorial gamma!/(gamma-j)!
  double acc = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= q; ++j) {
    if (j > 0) binom = binom * double(q - j + 1) / double(j);
    if (gamma - j < 0) break;
    double ff = 1.0;
    for (int i = 0; i < j; ++i) ff *= double(gamma - i);
    double mono = (gamma - j == 0) ? 1.0 : std::pow(u, double(gamma - j));
    acc += binom * ff * mono * psi1_deriv(u, q - j);
  }
  return acc;
}

double PartitionWindow::profile_moment_1d(int gamma, int q, int beta) const {
  double h1 = table_period_ / double(table_size_);
  double acc = 0.0;
  for (std::size_t i = 0; i < table_size_; ++i) {
    double u = -0.5 * table_period_ + h1 * double(i);
    if (std::abs(u) >= 0.5 * d_ + 2.0 * h1) continue;
    acc += std::pow(u, double(beta)) * monomial_profile_deriv(u, gamma, q);
  }
  return acc * h1;
}

GridFunction PartitionWindow::sampled(const Grid& g) const {
  return GridFunction::from_scalar(g, [this, &g](const std::array<double, 2>& x) {
    return cplx(psi(x, g.n), 0.0);
  });
}

PartitionWindow build_partition_window(const Grid& grid, double d) {
  return PartitionWindow(grid, d);
}

QuarkProfile quark_profile(const PartitionWindow& window, std::array<int, 2> gamma, int L) {
  if (!(L == -1 || (L >= 1 && (L + 1) % 2 == 0)))
    fail(errc::invalid_argument, "quark_profile: need (L+1)/2 integer, i.e. L = -1 or odd L >= 1");
  if (gamma[0] < 0 || gamma[1] < 0)
    fail(errc::invalid_argument, "quark_profile: multi-index must be nonnegative");
  const Grid& g = window.grid();
  GridFunction psi_gamma =
      GridFunction::from_scalar(g, [&](const std::array<double, 2>& x) {
        double v = std::pow(x[0], double(gamma[0])) * window.psi1(x[0]);
        if (g.n == 2) v *= std::pow(x[1], double(gamma[1])) * window.psi1(x[1]);
        return cplx(v, 0.0);
      });
  if (L == -1) return QuarkProfile{gamma, L, std::move(psi_gamma)};
  int p = (L + 1) / 2;
  GridFunction prof = apply_multiplier(
      psi_gamma, Multiplier::radial([p](double r) { return std::pow(r, 2.0 * double(p)); },
                                    "|xi|^{L+1}"));
  return QuarkProfile{gamma, L, std::move(prof)};
}

double quark_profile_moment(const PartitionWindow& window, std::array<int, 2> gamma, int L,
                            std::array<int, 2> beta) {
  int n = window.grid().n;
  if (L == -1) {
    double v = window.profile_moment_1d(gamma[0], 0, beta[0]);
    if (n == 2) v *= window.profile_moment_1d(gamma[1], 0, beta[1]);
    return v;
  }
  int P = (L + 1) / 2;
  double sign = (P % 2 == 0) ? 1.0 : -1.0;
  if (n == 1) return sign * window.profile_moment_1d(gamma[0], 2 * P, beta[0]);
  // (-Delta)^P = (-1)^P sum_j C(P, j) d0^{2j} d1^{2(P-j)}
  double acc = 0.0;
  double binom = 1.0;
  for (int j = 0; j <= P; ++j) {
    if (j > 0) binom = binom * double(P - j + 1) / double(j);
    acc += binom * window.profile_moment_1d(gamma[0], 2 * j, beta[0]) *
           window.profile_moment_1d(gamma[1], 2 * (P - j), beta[1]);
  }
  return sign * acc;
}

} // namespace bk

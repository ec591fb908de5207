#include "besovkit/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "besovkit/fft.hpp"
#include "besovkit/simd.hpp"

namespace bk {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Forward/backward lattice transform of one plane. The alternating sign
// absorbs the phase e^{+- i xi T/2} of the half-period coordinate offset, so
// the planes approximate the continuous transform with its usual
// normalization. dir = -1 samples -> spectrum, dir = +1 back.
void plane_transform(const Grid& g, std::vector<cplx>& plane, int dir) {
  const std::size_t N = g.N;
  auto scale_1d = [&](cplx* row) {
    for (std::size_t k = 1; k < N; k += 2) row[k] = -row[k];
  };
  if (g.n == 1) {
    if (dir < 0) {
      fft::pow2(plane.data(), N, -1);
      scale_1d(plane.data());
      double w = g.h() / std::sqrt(2.0 * kPi);
      simd::active().cscale_inplace(plane.data(), w, N);
    } else {
      scale_1d(plane.data());
      fft::pow2(plane.data(), N, +1);
      double w = (2.0 * kPi / g.T) / std::sqrt(2.0 * kPi);
      simd::active().cscale_inplace(plane.data(), w, N);
    }
    return;
  }
  // 2D: rows then columns; the (-1)^{k0+k1} factor factorizes.
  std::vector<cplx> col(N);
  if (dir < 0) {
    for (std::size_t r = 0; r < N; ++r) fft::pow2(plane.data() + r * N, N, -1);
    for (std::size_t c = 0; c < N; ++c) {
      for (std::size_t r = 0; r < N; ++r) col[r] = plane[r * N + c];
      fft::pow2(col.data(), N, -1);
      for (std::size_t r = 0; r < N; ++r) plane[r * N + c] = col[r];
    }
    for (std::size_t r = 0; r < N; ++r) {
      cplx* row = plane.data() + r * N;
      if (r & 1)
        for (std::size_t k = 0; k < N; k += 2) row[k] = -row[k];
      else
        scale_1d(row);
    }
    double w = g.h() * g.h() / (2.0 * kPi);
    simd::active().cscale_inplace(plane.data(), w, N * N);
  } else {
    for (std::size_t r = 0; r < N; ++r) {
      cplx* row = plane.data() + r * N;
      if (r & 1)
        for (std::size_t k = 0; k < N; k += 2) row[k] = -row[k];
      else
        scale_1d(row);
    }
    for (std::size_t r = 0; r < N; ++r) fft::pow2(plane.data() + r * N, N, +1);
    for (std::size_t c = 0; c < N; ++c) {
      for (std::size_t r = 0; r < N; ++r) col[r] = plane[r * N + c];
      fft::pow2(col.data(), N, +1);
      for (std::size_t r = 0; r < N; ++r) plane[r * N + c] = col[r];
    }
    double dxi = 2.0 * kPi / g.T;
    double w = dxi * dxi / (2.0 * kPi);
    simd::active().cscale_inplace(plane.data(), w, N * N);
  }
}

} // namespace

Grid Grid::make(int n, std::size_t N, double T) {
  if (n != 1 && n != 2) fail(errc::invalid_argument, "Grid: n must be 1 or 2");
  if (!fft::is_pow2(N) || N < 16)
    fail(errc::invalid_argument, "Grid: N must be a power of two with N >= 16");
  if (!(T > 0.0)) fail(errc::invalid_argument, "Grid: period T must be positive");
  return Grid{n, N, T};
}

double Grid::wrap_delta(double d) const {
  d = std::fmod(d, T);
  if (d > 0.5 * T) d -= T;
  if (d < -0.5 * T) d += T;
  return d;
}

double Grid::torus_dist(const std::array<double, 2>& a, const std::array<double, 2>& b) const {
  double d0 = wrap_delta(a[0] - b[0]);
  if (n == 1) return std::abs(d0);
  double d1 = wrap_delta(a[1] - b[1]);
  return std::hypot(d0, d1);
}

Multiplier Multiplier::one() {
  return Multiplier{[](const std::array<double, 2>&) { return cplx(1.0, 0.0); }, "1"};
}

Multiplier Multiplier::radial(std::function<double(double)> f, std::string label) {
  return Multiplier{[fn = std::move(f)](const std::array<double, 2>& xi) {
                      return cplx(fn(std::hypot(xi[0], xi[1])), 0.0);
                    },
                    std::move(label)};
}

Multiplier Multiplier::dilated(double scale) const {
  auto base = eval;
  return Multiplier{[base, scale](const std::array<double, 2>& xi) {
                      return base({scale * xi[0], scale * xi[1]});
                    },
                    label};
}

GridFunction::GridFunction(Grid g, ValueSpace s)
    : grid_(g), space_(s),
      values_(std::size_t(s.dim), std::vector<cplx>(g.points(), cplx(0, 0))) {}

GridFunction GridFunction::from_scalar(Grid g,
                                       const std::function<cplx(const std::array<double, 2>&)>& f) {
  GridFunction out(g, ValueSpace::euclidean(1));
  for (std::size_t i = 0; i < g.points(); ++i) out.values_[0][i] = f(g.point(i));
  return out;
}

GridFunction GridFunction::from_components(
    Grid g, ValueSpace s, const std::function<cplx(int, const std::array<double, 2>&)>& f) {
  GridFunction out(g, s);
  for (int c = 0; c < s.dim; ++c)
    for (std::size_t i = 0; i < g.points(); ++i) out.values_[std::size_t(c)][i] = f(c, g.point(i));
  return out;
}

GridFunction GridFunction::from_spectrum(Grid g, ValueSpace s,
                                         std::vector<std::vector<cplx>> spectral) {
  if (spectral.size() != std::size_t(s.dim))
    fail(errc::invalid_argument, "from_spectrum: one spectral plane per component required");
  GridFunction out(g, s);
  for (int c = 0; c < s.dim; ++c) {
    if (spectral[std::size_t(c)].size() != g.points())
      fail(errc::invalid_argument, "from_spectrum: plane size mismatch");
    out.values_[std::size_t(c)] = spectral[std::size_t(c)];
    plane_transform(g, out.values_[std::size_t(c)], +1);
  }
  out.spectral_ = std::move(spectral);
  return out;
}

const std::vector<std::vector<cplx>>& GridFunction::spectrum() const {
  if (!spectral_) fail(errc::internal_inconsistency, "spectrum(): no spectral planes cached");
  return *spectral_;
}

EVector GridFunction::at(std::size_t idx) const {
  EVector v = EVector::zero(dim());
  for (int c = 0; c < dim(); ++c) v.c[std::size_t(c)] = values_[std::size_t(c)][idx];
  return v;
}

std::vector<double> GridFunction::magnitude_field() const {
  const std::size_t n = points();
  std::vector<double> out(n);
  if (dim() == 1 || space_.r == 2.0) {
    // |.|^2 accumulation then sqrt: vectorized path.
    std::vector<double> acc(n, 0.0);
    for (int c = 0; c < dim(); ++c)
      simd::active().abs2_accum(acc.data(), values_[std::size_t(c)].data(), n);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::sqrt(acc[i]);
    return out;
  }
  std::vector<const cplx*> planes(static_cast<std::size_t>(dim()), nullptr);
  for (int c = 0; c < dim(); ++c) planes[std::size_t(c)] = values_[std::size_t(c)].data();
  for (std::size_t i = 0; i < n; ++i) out[i] = pointwise_norm(planes.data(), dim(), i, space_.r);
  return out;
}

GridFunction& GridFunction::operator+=(const GridFunction& o) {
  if (!(grid_ == o.grid_) || !(space_ == o.space_))
    fail(errc::invalid_argument, "GridFunction +=: grid or value-space mismatch");
  for (int c = 0; c < dim(); ++c)
    simd::active().caxpy(values_[std::size_t(c)].data(), cplx(1, 0),
                         o.values_[std::size_t(c)].data(), points());
  spectral_.reset();
  return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& o) {
  if (!(grid_ == o.grid_) || !(space_ == o.space_))
    fail(errc::invalid_argument, "GridFunction -=: grid or value-space mismatch");
  for (int c = 0; c < dim(); ++c)
    simd::active().caxpy(values_[std::size_t(c)].data(), cplx(-1, 0),
                         o.values_[std::size_t(c)].data(), points());
  spectral_.reset();
  return *this;
}

GridFunction& GridFunction::operator*=(cplx s) {
  for (int c = 0; c < dim(); ++c)
    simd::active().cscale_inplace(values_[std::size_t(c)].data(), s, points());
  if (spectral_)
    for (auto& pl : *spectral_) simd::active().cscale_inplace(pl.data(), s, points());
  return *this;
}

double GridFunction::max_abs_diff(const GridFunction& o) const {
  double m = 0.0;
  for (int c = 0; c < dim(); ++c)
    for (std::size_t i = 0; i < points(); ++i)
      m = std::max(m, std::abs(values_[std::size_t(c)][i] - o.values_[std::size_t(c)][i]));
  return m;
}

GridFunction transform_forward(const GridFunction& f) {
  GridFunction out = f;
  if (out.spectral_) return out;
  std::vector<std::vector<cplx>> spec = out.values_;
  for (auto& pl : spec) plane_transform(out.grid_, pl, -1);
  out.spectral_ = std::move(spec);
  return out;
}

std::vector<std::vector<cplx>> spectrum_of(const GridFunction& f) {
  if (f.has_spectrum()) return f.spectrum();
  std::vector<std::vector<cplx>> spec = f.values_;
  for (auto& pl : spec) plane_transform(f.grid_, pl, -1);
  return spec;
}

GridFunction apply_multiplier(const GridFunction& f, const Multiplier& m) {
  const Grid& g = f.grid();
  std::vector<cplx> symbol(g.points());
  for (std::size_t i = 0; i < g.points(); ++i) {
    cplx v = m(g.freq_at(i));
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
      fail(errc::invalid_multiplier,
           "apply_multiplier: symbol '" + m.label + "' is not finite on the lattice");
    symbol[i] = v;
  }
  auto spec = spectrum_of(f);
  for (auto& pl : spec) simd::active().cmul_inplace(pl.data(), symbol.data(), g.points());
  return GridFunction::from_spectrum(g, f.space(), std::move(spec));
}

double lp_norm_field(const Grid& g, const std::vector<double>& field, double p) {
  if (!(p > 0.0)) fail(errc::invalid_argument, "lp_norm: p must be positive");
  const std::size_t n = field.size();
  if (p == kInf) return simd::active().max(field.data(), n);
  double cell = std::pow(g.h(), double(g.n));
  double acc;
  if (p == 2.0) {
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = field[i] * field[i];
    acc = simd::active().sum(sq.data(), n);
  } else if (p == 1.0) {
    acc = simd::active().sum(field.data(), n);
  } else {
    acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += std::pow(field[i], p);
  }
  return std::pow(cell * acc, 1.0 / p);
}

double lp_norm(const GridFunction& f, double p) {
  return lp_norm_field(f.grid(), f.magnitude_field(), p);
}

GridFunction convolve(const GridFunction& f, const GridFunction& g) {
  if (!(f.grid() == g.grid())) fail(errc::invalid_argument, "convolve: grid mismatch");
  if (g.dim() != 1) fail(errc::invalid_argument, "convolve: kernel must be scalar");
  auto gspec = spectrum_of(g);
  auto spec = spectrum_of(f);
  for (auto& pl : spec) simd::active().cmul_inplace(pl.data(), gspec[0].data(), f.points());
  return GridFunction::from_spectrum(f.grid(), f.space(), std::move(spec));
}

namespace {

// Ball averages of `mag` for lattice radius w (in samples), then dilation by
// the same ball. 1D: intervals via prefix sums and a monotone-deque max.
struct RunningMax {
  // sliding max over circular windows; works on a doubled array.
  static void window_max(const std::vector<double>& a2, std::size_t N, std::size_t w,
                         std::vector<double>& out) {
    // out[i] = max a2[i .. i+2w], i in [0, N) of the doubled array laid out so
    // that index i corresponds to grid point (i + w) mod N.
    std::vector<std::size_t> dq(a2.size());
    std::size_t head = 0, tail = 0;
    std::size_t span = 2 * w + 1;
    for (std::size_t i = 0; i < a2.size(); ++i) {
      while (tail > head && a2[dq[tail - 1]] <= a2[i]) --tail;
      dq[tail++] = i;
      if (i + 1 >= span) {
        std::size_t lead = i + 1 - span;
        while (dq[head] < lead + 0) ++head;
        if (lead < N) out[lead] = a2[dq[head]];
      }
    }
  }
};

std::vector<double> hl_max_1d(const Grid& g, const std::vector<double>& mag) {
  const std::size_t N = g.N;
  // the degenerate ball {x} seeds the supremum, so M(f) dominates ||f||
  std::vector<double> result = mag;
  // windows [y + N - w, y + N + w] reach up to 2N + N/2, so keep 3N entries
  std::vector<double> prefix(3 * N + 1, 0.0);
  for (std::size_t i = 0; i < 3 * N; ++i) prefix[i + 1] = prefix[i] + mag[i % N];

  for (std::size_t w = 1; 2 * w <= N; w <<= 1) {
    std::vector<double> avg(N);
    if (2 * w + 1 > N) {
      // the ball wraps the whole torus: every point exactly once
      double mean = prefix[N] / double(N);
      std::fill(avg.begin(), avg.end(), mean);
    } else {
      double inv_cnt = 1.0 / double(2 * w + 1);
      for (std::size_t y = 0; y < N; ++y) {
        std::size_t lo = y + N - w;
        avg[y] = (prefix[lo + 2 * w + 1] - prefix[lo]) * inv_cnt;
      }
    }
    // dilation: max over centers y with |x - y| <= w
    std::vector<double> dil(N);
    if (2 * w + 1 > N) {
      double m = *std::max_element(avg.begin(), avg.end());
      std::fill(dil.begin(), dil.end(), m);
    } else {
      std::vector<double> avg2(2 * N);
      for (std::size_t i = 0; i < 2 * N; ++i) avg2[i] = avg[(i + N - w) % N];
      RunningMax::window_max(avg2, N, w, dil);
    }
    for (std::size_t x = 0; x < N; ++x) result[x] = std::max(result[x], dil[x]);
  }
  return result;
}

std::vector<double> hl_max_2d(const Grid& g, const std::vector<double>& mag) {
  const std::size_t N = g.N;
  const std::size_t mask = N - 1;
  std::vector<double> result = mag; // degenerate ball {x}

  // row prefix sums; windows reach index 2N + N/2, so keep 3N entries per row
  const std::size_t pstride = 3 * N + 1;
  std::vector<double> prefix(N * pstride);
  for (std::size_t r = 0; r < N; ++r) {
    double* p = prefix.data() + r * pstride;
    p[0] = 0.0;
    for (std::size_t i = 0; i < 3 * N; ++i) p[i + 1] = p[i] + mag[r * N + (i & mask)];
  }

  for (std::size_t w = 1; 2 * w <= N; w <<= 1) {
    double r_phys = double(w) * g.h();
    // per-row half-widths of the disc of radius w (in samples). Row offsets on
    // the torus are counted once each: dy = 0 and dy = N/2 are self-paired.
    std::vector<std::size_t> half(w + 1);
    std::size_t count = 0;
    for (std::size_t dy = 0; dy <= w; ++dy) {
      double rem = r_phys * r_phys - double(dy) * g.h() * double(dy) * g.h();
      std::size_t hw = rem <= 0 ? 0 : std::size_t(std::floor(std::sqrt(rem) / g.h() + 1e-12));
      std::size_t row_pts = 2 * hw + 1 > N ? N : 2 * hw + 1;
      half[dy] = hw;
      int reps = (dy == 0 || 2 * dy == N) ? 1 : 2;
      count += std::size_t(reps) * row_pts;
    }
    double inv_cnt = 1.0 / double(count);

    // disc averages
    std::vector<double> avg(N * N, 0.0);
    std::vector<double> row_total(N, 0.0);
    for (std::size_t r = 0; r < N; ++r)
      row_total[r] = prefix[r * pstride + N];
    for (std::size_t y0 = 0; y0 < N; ++y0) {
      for (std::size_t dy = 0; dy <= w; ++dy) {
        std::size_t rows[2] = {(y0 + dy) & mask, (y0 + N - dy) & mask};
        int reps = (dy == 0 || 2 * dy == N) ? 1 : 2;
        std::size_t hw = half[dy];
        for (int s = 0; s < reps; ++s) {
          const double* p = prefix.data() + rows[s] * pstride;
          if (2 * hw + 1 > N) {
            double full = row_total[rows[s]];
            for (std::size_t y1 = 0; y1 < N; ++y1) avg[y0 * N + y1] += full;
          } else {
            for (std::size_t y1 = 0; y1 < N; ++y1) {
              std::size_t lo = y1 + N - hw;
              avg[y0 * N + y1] += p[lo + 2 * hw + 1] - p[lo];
            }
          }
        }
      }
      for (std::size_t y1 = 0; y1 < N; ++y1) avg[y0 * N + y1] *= inv_cnt;
    }

    // dilation by the same disc: row sliding maxima merged across dy
    std::vector<double> rowmax(N), row2(2 * N), dil(N * N, 0.0);
    for (std::size_t dy = 0; dy <= w; ++dy) {
      std::size_t hw = half[dy];
      std::vector<double> rm(N * N);
      for (std::size_t r = 0; r < N; ++r) {
        if (2 * hw + 1 > N) {
          double m = 0.0;
          for (std::size_t i = 0; i < N; ++i) m = std::max(m, avg[r * N + i]);
          std::fill(rm.begin() + r * N, rm.begin() + (r + 1) * N, m);
        } else {
          for (std::size_t i = 0; i < 2 * N; ++i) row2[i] = avg[r * N + ((i + N - hw) & mask)];
          RunningMax::window_max(row2, N, hw, rowmax);
          std::copy(rowmax.begin(), rowmax.end(), rm.begin() + r * N);
        }
      }
      for (std::size_t x0 = 0; x0 < N; ++x0) {
        std::size_t rows[2] = {(x0 + dy) & mask, (x0 + N - dy) & mask};
        int reps = (dy == 0 || 2 * dy == N) ? 1 : 2;
        for (int s = 0; s < reps; ++s) {
          const double* src = rm.data() + rows[s] * N;
          double* dst = dil.data() + x0 * N;
          for (std::size_t x1 = 0; x1 < N; ++x1) dst[x1] = std::max(dst[x1], src[x1]);
        }
      }
    }
    for (std::size_t i = 0; i < N * N; ++i) result[i] = std::max(result[i], dil[i]);
  }
  return result;
}

} // namespace

GridFunction hardy_littlewood_max(const GridFunction& f) {
  const Grid& g = f.grid();
  std::vector<double> mag = f.magnitude_field();
  std::vector<double> m = g.n == 1 ? hl_max_1d(g, mag) : hl_max_2d(g, mag);
  GridFunction out(g, ValueSpace::euclidean(1));
  for (std::size_t i = 0; i < g.points(); ++i) out.plane(0)[i] = m[i];
  return out;
}

namespace {

std::vector<double> weighted_sup_1d_full(const Grid& g, const std::vector<double>& mag,
                                         const std::vector<double>& w) {
  const std::size_t N = g.N;
  // mag[(x - y) mod N] = magR2[(N - x) + y] with magR doubled
  std::vector<double> magR2(2 * N);
  for (std::size_t i = 0; i < N; ++i) magR2[i] = magR2[i + N] = mag[(N - i) % N];
  std::vector<double> out(N);
  const auto& k = simd::active();
  for (std::size_t x = 0; x < N; ++x) out[x] = k.max_mul(magR2.data() + (N - x), w.data(), N);
  return out;
}

} // namespace

std::vector<double> weighted_sup_field(const Grid& g, const std::vector<double>& mag, double rate,
                                       double a) {
  if (!(a > 0.0)) fail(errc::invalid_argument, "weighted_sup_field: exponent a must be positive");
  const std::size_t P = g.points();
  if (g.n == 1) {
    // full scan with the SIMD row kernel; weights indexed by offset y
    std::vector<double> w(P);
    for (std::size_t y = 0; y < P; ++y) {
      double off = std::abs(g.wrap_delta(g.h() * double(y)));
      w[y] = std::pow(1.0 + rate * off, -a);
    }
    return weighted_sup_1d_full(g, mag, w);
  }

  // 2D: exact block-level branch and bound. Blocks of sources carry their
  // maximum; a block is scanned only when blockmax * w(closest offset) beats
  // the running value. The weight at the componentwise-minimal offset bounds
  // the weight anywhere in the block, so skipped blocks cannot win.
  const std::size_t N = g.N;
  const std::size_t mask = N - 1;
  std::vector<double> w(P); // weight indexed by the flat offset (x - y)
  for (std::size_t off = 0; off < P; ++off) {
    double d0 = g.wrap_delta(g.h() * double(off / N));
    double d1 = g.wrap_delta(g.h() * double(off & mask));
    w[off] = std::pow(1.0 + rate * std::hypot(d0, d1), -a);
  }

  const std::size_t B = std::min<std::size_t>(16, N);
  const std::size_t nb = N / B;
  std::vector<double> blockmax(nb * nb, 0.0);
  double gmax = 0.0;
  std::size_t y_gmax = 0;
  for (std::size_t y = 0; y < P; ++y) {
    std::size_t b = (y / N) / B * nb + (y & mask) / B;
    blockmax[b] = std::max(blockmax[b], mag[y]);
    if (mag[y] > gmax) {
      gmax = mag[y];
      y_gmax = y;
    }
  }
  // per-axis sample distance from coordinate i to block bi (0 when covering)
  std::vector<std::size_t> axdist(N * nb, 0);
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t bi = 0; bi < nb; ++bi) {
      std::size_t lo = bi * B, hi = lo + B - 1;
      std::size_t d;
      if (i >= lo && i <= hi) {
        d = 0;
      } else {
        std::size_t fwd = i > hi ? i - hi : lo - i;              // direct gap
        std::size_t other = N - (i > hi ? i - lo : hi - i);      // wrapped gap
        d = std::min(fwd, other);
      }
      axdist[i * nb + bi] = d;
    }

  std::vector<double> out(P);
  for (std::size_t x = 0; x < P; ++x) {
    std::size_t x0 = x / N, x1 = x & mask;
    std::size_t offg = ((x0 + N - y_gmax / N) & mask) * N + ((x1 + N - (y_gmax & mask)) & mask);
    double m = std::max(mag[x], gmax * w[offg]);
    const std::size_t* ax0 = axdist.data() + x0 * nb;
    const std::size_t* ax1 = axdist.data() + x1 * nb;
    for (std::size_t b0 = 0; b0 < nb; ++b0)
      for (std::size_t b1 = 0; b1 < nb; ++b1) {
        double bm = blockmax[b0 * nb + b1];
        if (bm <= m) continue;
        if (bm * w[ax0[b0] * N + ax1[b1]] <= m) continue;
        for (std::size_t r = b0 * B; r < b0 * B + B; ++r) {
          std::size_t offr = ((x0 + N - r) & mask) * N;
          const double* mrow = mag.data() + r * N;
          for (std::size_t c = b1 * B; c < b1 * B + B; ++c) {
            double v = mrow[c] * w[offr + ((x1 + N - c) & mask)];
            if (v > m) m = v;
          }
        }
      }
    out[x] = m;
  }
  return out;
}

GridFunction peetre_maximal(const GridFunction& f, const Multiplier& kernel, int j, double a) {
  if (!(a > 0.0)) fail(errc::invalid_argument, "peetre_maximal: a must be positive");
  if (j < 0) fail(errc::invalid_argument, "peetre_maximal: scale j must be >= 0");
  double scale = std::ldexp(1.0, -j);
  GridFunction conv = apply_multiplier(f, kernel.dilated(scale));
  std::vector<double> mag = conv.magnitude_field();
  std::vector<double> sup = weighted_sup_field(f.grid(), mag, std::ldexp(1.0, j), a);
  GridFunction out(f.grid(), ValueSpace::euclidean(1));
  for (std::size_t i = 0; i < f.points(); ++i) out.plane(0)[i] = sup[i];
  return out;
}

} // namespace bk

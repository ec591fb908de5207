// AVX2 variants. Compiled only on x86-64 (see CMakeLists); selected at runtime
// after a cpuid check. Multiplications and max are kept FMA-free so results are
// bit-identical with the scalar reference; only the reduction order differs in
// the sum kernels.
#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include <cmath>

#include "besovkit/simd.hpp"

namespace bk::simd {

namespace {

void cmul_inplace_avx2(cplx* a, const cplx* b, std::size_t n) {
  double* ap = reinterpret_cast<double*>(a);
  const double* bp = reinterpret_cast<const double*>(b);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    // two complex numbers = (re0, im0, re1, im1)
    __m256d va = _mm256_loadu_pd(ap + 2 * i);
    __m256d vb = _mm256_loadu_pd(bp + 2 * i);
    __m256d b_re = _mm256_movedup_pd(vb);                  // (re, re, re, re)
    __m256d b_im = _mm256_permute_pd(vb, 0xF);             // (im, im, im, im)
    __m256d a_sw = _mm256_permute_pd(va, 0x5);             // (im0, re0, im1, re1)
    __m256d t0 = _mm256_mul_pd(va, b_re);
    __m256d t1 = _mm256_mul_pd(a_sw, b_im);
    __m256d res = _mm256_addsub_pd(t0, t1);                // (re*re-im*im, re*im+im*re)
    _mm256_storeu_pd(ap + 2 * i, res);
  }
  for (; i < n; ++i) a[i] *= b[i];
}

void cscale_inplace_avx2(cplx* a, cplx s, std::size_t n) {
  double* ap = reinterpret_cast<double*>(a);
  __m256d s_re = _mm256_set1_pd(s.real());
  __m256d s_im = _mm256_set1_pd(s.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(ap + 2 * i);
    __m256d a_sw = _mm256_permute_pd(va, 0x5);
    __m256d res = _mm256_addsub_pd(_mm256_mul_pd(va, s_re), _mm256_mul_pd(a_sw, s_im));
    _mm256_storeu_pd(ap + 2 * i, res);
  }
  for (; i < n; ++i) a[i] *= s;
}

void caxpy_avx2(cplx* y, cplx alpha, const cplx* x, std::size_t n) {
  double* yp = reinterpret_cast<double*>(y);
  const double* xp = reinterpret_cast<const double*>(x);
  __m256d s_re = _mm256_set1_pd(alpha.real());
  __m256d s_im = _mm256_set1_pd(alpha.imag());
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d vx = _mm256_loadu_pd(xp + 2 * i);
    __m256d x_sw = _mm256_permute_pd(vx, 0x5);
    __m256d prod = _mm256_addsub_pd(_mm256_mul_pd(vx, s_re), _mm256_mul_pd(x_sw, s_im));
    __m256d vy = _mm256_loadu_pd(yp + 2 * i);
    _mm256_storeu_pd(yp + 2 * i, _mm256_add_pd(vy, prod));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void abs2_accum_avx2(double* out, const cplx* a, std::size_t n) {
  const double* ap = reinterpret_cast<const double*>(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    __m256d va = _mm256_loadu_pd(ap + 2 * i);
    __m256d sq = _mm256_mul_pd(va, va);
    __m256d sw = _mm256_permute_pd(sq, 0x5);
    __m256d abs2 = _mm256_add_pd(sq, sw);  // (|z0|^2, |z0|^2, |z1|^2, |z1|^2)
    __m128d lo = _mm256_castpd256_pd128(abs2);
    __m128d hi = _mm256_extractf128_pd(abs2, 1);
    __m128d pair = _mm_unpacklo_pd(lo, hi);
    __m128d prev = _mm_loadu_pd(out + i);
    _mm_storeu_pd(out + i, _mm_add_pd(prev, pair));
  }
  for (; i < n; ++i) {
    double re = a[i].real(), im = a[i].imag();
    out[i] += re * re + im * im;
  }
}

double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double hmax(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  __m128d m = _mm_max_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_max_sd(m, _mm_unpackhi_pd(m, m)));
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

double sum_sqrt_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_sqrt_pd(_mm256_loadu_pd(a + i)));
  double s = hsum(acc);
  for (; i < n; ++i) s += std::sqrt(a[i]);
  return s;
}

double max_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_max_pd(acc, _mm256_loadu_pd(a + i));
  double m = hmax(acc);
  for (; i < n; ++i) m = a[i] > m ? a[i] : m;
  return m;
}

double max_mul_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d prod = _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_max_pd(acc, prod);
  }
  double m = hmax(acc);
  for (; i < n; ++i) {
    double v = a[i] * b[i];
    m = v > m ? v : m;
  }
  return m;
}

} // namespace

extern const Kernels avx2_table;
const Kernels avx2_table = {
    cmul_inplace_avx2, cscale_inplace_avx2, caxpy_avx2, abs2_accum_avx2,
    sum_avx2,          sum_sqrt_avx2,       max_avx2,   max_mul_avx2,
    "avx2",
};

} // namespace bk::simd

#endif // x86-64

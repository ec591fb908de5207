// NEON variants for aarch64. Same bit-compatibility policy as the AVX2 table:
// no FMA in the multiply/max kernels.
#if defined(__aarch64__)

#include <arm_neon.h>

#include <cmath>

#include "besovkit/simd.hpp"

namespace bk::simd {

namespace {

void cmul_inplace_neon(cplx* a, const cplx* b, std::size_t n) {
  double* ap = reinterpret_cast<double*>(a);
  const double* bp = reinterpret_cast<const double*>(b);
  for (std::size_t i = 0; i < n; ++i) {
    float64x2_t va = vld1q_f64(ap + 2 * i);          // (re, im)
    float64x2_t vb = vld1q_f64(bp + 2 * i);
    float64x2_t b_re = vdupq_laneq_f64(vb, 0);
    float64x2_t b_im = vdupq_laneq_f64(vb, 1);
    float64x2_t a_sw = vextq_f64(va, va, 1);         // (im, re)
    float64x2_t t0 = vmulq_f64(va, b_re);
    float64x2_t t1 = vmulq_f64(a_sw, b_im);
    const float64x2_t sign = {-1.0, 1.0};
    vst1q_f64(ap + 2 * i, vaddq_f64(t0, vmulq_f64(t1, sign)));
  }
}

void cscale_inplace_neon(cplx* a, cplx s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] *= s;
}

void caxpy_neon(cplx* y, cplx alpha, const cplx* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void abs2_accum_neon(double* out, const cplx* a, std::size_t n) {
  const double* ap = reinterpret_cast<const double*>(a);
  for (std::size_t i = 0; i < n; ++i) {
    float64x2_t va = vld1q_f64(ap + 2 * i);
    float64x2_t sq = vmulq_f64(va, va);
    out[i] += vaddvq_f64(sq);
  }
}

double sum_neon(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

double sum_sqrt_neon(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vsqrtq_f64(vld1q_f64(a + i)));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += std::sqrt(a[i]);
  return s;
}

double max_neon(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vmaxq_f64(acc, vld1q_f64(a + i));
  double m = vmaxvq_f64(acc);
  for (; i < n; ++i) m = a[i] > m ? a[i] : m;
  return m;
}

double max_mul_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vmaxq_f64(acc, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
  double m = vmaxvq_f64(acc);
  for (; i < n; ++i) {
    double v = a[i] * b[i];
    m = v > m ? v : m;
  }
  return m;
}

} // namespace

extern const Kernels neon_table;
const Kernels neon_table = {
    cmul_inplace_neon, cscale_inplace_neon, caxpy_neon, abs2_accum_neon,
    sum_neon,          sum_sqrt_neon,       max_neon,   max_mul_neon,
    "neon",
};

} // namespace bk::simd

#endif // aarch64

#include <cmath>

#include "besovkit/simd.hpp"

namespace bk::simd {

namespace {

void cmul_inplace_scalar(cplx* a, const cplx* b, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
}

void cscale_inplace_scalar(cplx* a, cplx s, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) a[i] *= s;
}

void caxpy_scalar(cplx* y, cplx alpha, const cplx* x, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void abs2_accum_scalar(double* out, const cplx* a, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    double re = a[i].real(), im = a[i].imag();
    out[i] += re * re + im * im;
  }
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

double sum_sqrt_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += std::sqrt(a[i]);
  return acc;
}

double max_scalar(const double* a, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) m = a[i] > m ? a[i] : m;
  return m;
}

double max_mul_scalar(const double* a, const double* b, std::size_t n) {
  double m = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double v = a[i] * b[i];
    m = v > m ? v : m;
  }
  return m;
}

} // namespace

const Kernels scalar_table = {
    cmul_inplace_scalar, cscale_inplace_scalar, caxpy_scalar, abs2_accum_scalar,
    sum_scalar,          sum_sqrt_scalar,       max_scalar,   max_mul_scalar,
    "scalar",
};

} // namespace bk::simd

#pragma once

#include <complex>
#include <cstddef>
#include <string>

namespace bk::simd {

using cplx = std::complex<double>;

// Hot inner loops of the norm engines, hand-vectorized where it pays off.
// Every entry has a scalar reference implementation; the active table is picked
// at runtime (AVX2 on x86-64, NEON on aarch64, scalar otherwise) and can be
// forced with BESOVKIT_SIMD=scalar|avx2|neon. The variants are equivalence-tested
// against the scalar reference.
struct Kernels {
  // a[i] *= b[i]
  void (*cmul_inplace)(cplx* a, const cplx* b, std::size_t n);
  // a[i] *= s
  void (*cscale_inplace)(cplx* a, cplx s, std::size_t n);
  // y[i] += alpha * x[i]
  void (*caxpy)(cplx* y, cplx alpha, const cplx* x, std::size_t n);
  // out[i] += |a[i]|^2
  void (*abs2_accum)(double* out, const cplx* a, std::size_t n);
  // sum_i a[i]   (a real, nonnegative in our uses)
  double (*sum)(const double* a, std::size_t n);
  // sum_i sqrt(a[i])
  double (*sum_sqrt)(const double* a, std::size_t n);
  // max_i a[i]
  double (*max)(const double* a, std::size_t n);
  // max_i a[i]*b[i]  (both real, nonnegative) -- maximal-function row kernel
  double (*max_mul)(const double* a, const double* b, std::size_t n);

  const char* name;
};

// Active table (selected once, thread-safe).
const Kernels& active();

// Named tables for equivalence tests. Returns nullptr if the ISA is not
// compiled in or not supported by the running CPU.
const Kernels* table(const std::string& name);

extern const Kernels scalar_table;

} // namespace bk::simd

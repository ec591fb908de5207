#pragma once

#include <complex>
#include <cstddef>

namespace bk::fft {

using cplx = std::complex<double>;

constexpr bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place radix-2 transform, n a power of two.
// sign = -1: forward kernel sum_j a_j e^{-2pi i jk/n}; sign = +1: conjugate kernel.
// No 1/n normalization is applied in either direction.
void pow2(cplx* data, std::size_t n, int sign);

// DFT of arbitrary length via Bluestein's chirp-z reduction to a pow2 transform.
// out[k] = sum_j in[j] e^{sign * 2pi i jk/n}. in and out must not alias.
void bluestein(const cplx* in, cplx* out, std::size_t n, int sign);

} // namespace bk::fft

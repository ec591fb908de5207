#include "besovkit/fft.hpp"

#include <cmath>
#include <unordered_map>
#include <vector>

#include "besovkit/errors.hpp"

namespace bk::fft {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Twiddle table for a given size, forward sign. Cached per thread so transforms
// stay reentrant without locking.
const std::vector<cplx>& twiddles(std::size_t n) {
  thread_local std::unordered_map<std::size_t, std::vector<cplx>> cache;
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<cplx> w(n / 2);
  for (std::size_t k = 0; k < n / 2; ++k) {
    double ang = -2.0 * kPi * double(k) / double(n);
    w[k] = cplx(std::cos(ang), std::sin(ang));
  }
  return cache.emplace(n, std::move(w)).first->second;
}

void bit_reverseify(cplx* a, std::size_t n) {
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
}

} // namespace

void pow2(cplx* a, std::size_t n, int sign) {
  if (!is_pow2(n)) fail(errc::invalid_argument, "fft::pow2: length must be a power of two");
  if (n == 1) return;
  const auto& w = twiddles(n);
  bit_reverseify(a, n);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        cplx tw = w[k * step];
        if (sign > 0) tw = std::conj(tw);
        cplx u = a[i + k];
        cplx v = a[i + k + len / 2] * tw;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

void bluestein(const cplx* in, cplx* out, std::size_t n, int sign) {
  if (n == 0) fail(errc::invalid_argument, "fft::bluestein: empty input");
  if (is_pow2(n)) {
    std::vector<cplx> tmp(in, in + n);
    pow2(tmp.data(), n, sign);
    for (std::size_t k = 0; k < n; ++k) out[k] = tmp[k];
    return;
  }
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;

  // Chirp factors e^{sign*pi*i*j^2/n}; j^2 reduced mod 2n to keep the angle small.
  std::vector<cplx> chirp(n);
  for (std::size_t j = 0; j < n; ++j) {
    std::size_t j2 = (j * j) % (2 * n);
    double ang = double(sign) * kPi * double(j2) / double(n);
    chirp[j] = cplx(std::cos(ang), std::sin(ang));
  }

  std::vector<cplx> a(m, cplx(0, 0)), b(m, cplx(0, 0));
  for (std::size_t j = 0; j < n; ++j) a[j] = in[j] * chirp[j];
  b[0] = std::conj(chirp[0]);
  for (std::size_t j = 1; j < n; ++j) b[j] = b[m - j] = std::conj(chirp[j]);

  pow2(a.data(), m, -1);
  pow2(b.data(), m, -1);
  for (std::size_t j = 0; j < m; ++j) a[j] *= b[j];
  pow2(a.data(), m, +1);
  double inv_m = 1.0 / double(m);
  for (std::size_t k = 0; k < n; ++k) out[k] = a[k] * inv_m * chirp[k];
}

} // namespace bk::fft

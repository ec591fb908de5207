#include <doctest.h>

#include <random>
#include <vector>

#include "besovkit/fft.hpp"

using bk::fft::cplx;

namespace {

// reference DFT, O(n^2)
std::vector<cplx> naive_dft(const std::vector<cplx>& in, int sign) {
  const std::size_t n = in.size();
  std::vector<cplx> out(n, cplx(0, 0));
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j < n; ++j) {
      double ang = double(sign) * 2.0 * 3.141592653589793238462643 * double(j * k % n) / double(n);
      out[k] += in[j] * cplx(std::cos(ang), std::sin(ang));
    }
  return out;
}

std::vector<cplx> random_signal(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  std::vector<cplx> v(n);
  for (auto& z : v) z = cplx(g(rng), g(rng));
  return v;
}

} // namespace

TEST_CASE("pow2 transform matches the naive DFT") {
  for (std::size_t n : {16u, 64u}) {
    auto sig = random_signal(n, 11 + n);
    auto ref = naive_dft(sig, -1);
    std::vector<cplx> got = sig;
    bk::fft::pow2(got.data(), n, -1);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(got[k] - ref[k]) < 1e-10);
  }
}

TEST_CASE("pow2 round trip is exact to machine precision") {
  const std::size_t n = 1024;
  auto sig = random_signal(n, 42);
  std::vector<cplx> v = sig;
  bk::fft::pow2(v.data(), n, -1);
  bk::fft::pow2(v.data(), n, +1);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(v[i] / double(n) - sig[i]) < 1e-12);
}

TEST_CASE("bluestein matches the naive DFT at awkward lengths") {
  for (std::size_t n : {12u, 40u, 97u, 160u}) {
    auto sig = random_signal(n, 1000 + n);
    for (int sign : {-1, +1}) {
      auto ref = naive_dft(sig, sign);
      std::vector<cplx> got(n);
      bk::fft::bluestein(sig.data(), got.data(), n, sign);
      for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(got[k] - ref[k]) < 1e-9);
    }
  }
}

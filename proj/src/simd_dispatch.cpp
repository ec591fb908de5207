#include <cstdlib>
#include <string>

#include "besovkit/simd.hpp"

namespace bk::simd {

#if defined(__x86_64__) || defined(_M_X64)
extern const Kernels avx2_table;
#endif
#if defined(__aarch64__)
extern const Kernels neon_table;
#endif

namespace {

bool cpu_has_avx2() {
#if (defined(__x86_64__) || defined(_M_X64)) && (defined(__GNUC__) || defined(__clang__))
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

const Kernels* pick() {
  if (const char* env = std::getenv("BESOVKIT_SIMD")) {
    if (const Kernels* t = table(env)) return t;
  }
#if defined(__x86_64__) || defined(_M_X64)
  if (cpu_has_avx2()) return &avx2_table;
#endif
#if defined(__aarch64__)
  return &neon_table;
#endif
  return &scalar_table;
}

} // namespace

const Kernels& active() {
  static const Kernels* chosen = pick();
  return *chosen;
}

const Kernels* table(const std::string& name) {
  if (name == "scalar") return &scalar_table;
#if defined(__x86_64__) || defined(_M_X64)
  if (name == "avx2" && cpu_has_avx2()) return &avx2_table;
#endif
#if defined(__aarch64__)
  if (name == "neon") return &neon_table;
#endif
  return nullptr;
}

} // namespace bk::simd

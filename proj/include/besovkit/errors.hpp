#pragma once

#include <stdexcept>
#include <string>

namespace bk {

// Failure taxonomy shared by all modules. The CLI maps kinds to exit codes:
// config/validation problems -> 2, numerical failures -> 3, truncation -> 4.
enum class errc {
  invalid_argument,
  degenerate_input,
  resolution_too_small,
  invalid_multiplier,
  invalid_kernel,
  quadrature_failure,
  truncation_failure,
  convergence_failure,
  internal_inconsistency,
  io_failure,
};

class error : public std::runtime_error {
public:
  error(errc kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  errc kind() const noexcept { return kind_; }

private:
  errc kind_;
};

[[noreturn]] inline void fail(errc kind, const std::string& what) { throw error(kind, what); }

inline const char* errc_name(errc k) {
  switch (k) {
    case errc::invalid_argument: return "invalid-argument";
    case errc::degenerate_input: return "degenerate-input";
    case errc::resolution_too_small: return "resolution-too-small";
    case errc::invalid_multiplier: return "invalid-multiplier";
    case errc::invalid_kernel: return "invalid-kernel";
    case errc::quadrature_failure: return "quadrature-failure";
    case errc::truncation_failure: return "truncation-failure";
    case errc::convergence_failure: return "convergence-failure";
    case errc::internal_inconsistency: return "internal-inconsistency";
    case errc::io_failure: return "io-failure";
  }
  return "unknown";
}

} // namespace bk

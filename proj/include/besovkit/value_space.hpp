#pragma once

#include <complex>
#include <limits>
#include <vector>

#include "besovkit/errors.hpp"

namespace bk {

using cplx = std::complex<double>;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Finite-dimensional normed value space C^d with a p-norm, r in [1, inf].
// Stands in for the target space of vector-valued functions; r = 2 is the
// Euclidean case.
struct ValueSpace {
  int dim = 1;
  double r = 2.0;

  static ValueSpace euclidean(int d) { return make(d, 2.0); }
  static ValueSpace p_norm(int d, double r) { return make(d, r); }

  static ValueSpace make(int d, double r) {
    if (d < 1) fail(errc::invalid_argument, "ValueSpace: dim must be >= 1");
    if (!(r >= 1.0)) fail(errc::invalid_argument, "ValueSpace: p-norm exponent must satisfy r >= 1");
    return ValueSpace{d, r};
  }

  bool operator==(const ValueSpace& o) const { return dim == o.dim && r == o.r; }
};

// One point value in C^d.
struct EVector {
  std::vector<cplx> c;

  EVector() = default;
  explicit EVector(std::vector<cplx> comps) : c(std::move(comps)) {}
  static EVector zero(int d) { return EVector(std::vector<cplx>(std::size_t(d), cplx(0, 0))); }
  static EVector basis(int d, int i) {
    EVector v = zero(d);
    v.c[std::size_t(i)] = 1.0;
    return v;
  }
  int dim() const { return int(c.size()); }
};

double e_norm(const EVector& v, const ValueSpace& space);
EVector e_unit(const EVector& v, const ValueSpace& space);

// p-norm of d complex components gathered from strided storage; the reduction
// the grid module applies point by point.
double pointwise_norm(const cplx* const* planes, int d, std::size_t idx, double r);

} // namespace bk

#include "besovkit/value_space.hpp"

#include <cmath>

namespace bk {

double pointwise_norm(const cplx* const* planes, int d, std::size_t idx, double r) {
  if (d == 1) return std::abs(planes[0][idx]);
  if (r == 2.0) {
    double acc = 0.0;
    for (int c = 0; c < d; ++c) {
      double re = planes[c][idx].real(), im = planes[c][idx].imag();
      acc += re * re + im * im;
    }
    return std::sqrt(acc);
  }
  if (r == kInf) {
    double m = 0.0;
    for (int c = 0; c < d; ++c) m = std::max(m, std::abs(planes[c][idx]));
    return m;
  }
  double acc = 0.0;
  for (int c = 0; c < d; ++c) acc += std::pow(std::abs(planes[c][idx]), r);
  return std::pow(acc, 1.0 / r);
}

double e_norm(const EVector& v, const ValueSpace& space) {
  if (v.dim() != space.dim)
    fail(errc::invalid_argument, "e_norm: vector dimension does not match value space");
  std::vector<const cplx*> planes(v.c.size(), nullptr);
  for (std::size_t c = 0; c < v.c.size(); ++c) planes[c] = v.c.data() + c;
  return pointwise_norm(planes.data(), space.dim, 0, space.r);
}

EVector e_unit(const EVector& v, const ValueSpace& space) {
  double nrm = e_norm(v, space);
  if (nrm == 0.0) fail(errc::degenerate_input, "e_unit: zero vector has no direction");
  EVector out = v;
  for (auto& z : out.c) z /= nrm;
  return out;
}

} // namespace bk

#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "besovkit/value_space.hpp"

namespace bk {

// Uniform periodic grid on the n-torus of period T per axis, n in {1,2}.
// Points x_i = -T/2 + i*h per axis; frequency lattice xi = (2pi/T)*k with
// k in [-N/2, N/2).
struct Grid {
  int n = 1;
  std::size_t N = 16;
  double T = 1.0;

  static Grid make(int n, std::size_t N, double T);

  double h() const { return T / double(N); }
  std::size_t points() const { return n == 1 ? N : N * N; }
  double coord(std::size_t i) const { return -0.5 * T + h() * double(i); }

  // Signed frequency for FFT bin k in [0, N).
  double freq(std::size_t k) const {
    double m = (k < N / 2) ? double(k) : double(k) - double(N);
    return 2.0 * kPi_ * m / T;
  }
  double max_freq() const { return kPi_ * double(N) / T; }

  // Row-major flat index <-> per-axis indices (axis 0 is the slow one in 2D).
  std::size_t flat(std::size_t i0, std::size_t i1 = 0) const { return n == 1 ? i0 : i0 * N + i1; }
  std::array<double, 2> point(std::size_t idx) const {
    if (n == 1) return {coord(idx), 0.0};
    return {coord(idx / N), coord(idx % N)};
  }
  std::array<double, 2> freq_at(std::size_t idx) const {
    if (n == 1) return {freq(idx), 0.0};
    return {freq(idx / N), freq(idx % N)};
  }

  // Distance on the torus.
  double wrap_delta(double d) const;
  double torus_dist(const std::array<double, 2>& a, const std::array<double, 2>& b) const;

  bool operator==(const Grid& o) const { return n == o.n && N == o.N && T == o.T; }

private:
  static constexpr double kPi_ = 3.141592653589793238462643383279502884;
};

// Scalar symbol on the frequency lattice.
struct Multiplier {
  std::function<cplx(const std::array<double, 2>&)> eval;
  std::string label;

  cplx operator()(const std::array<double, 2>& xi) const { return eval(xi); }

  static Multiplier one();
  static Multiplier radial(std::function<double(double)> f, std::string label);
  // m(xi) -> m(scale*xi)
  Multiplier dilated(double scale) const;
};

// Sampled E-valued function with an optional spectral companion. Values are
// stored per component as contiguous planes; the spectral planes hold
// approximants of the continuous Fourier transform on the lattice,
//   F(xi) = (2pi)^{-n/2} h^n sum_x f(x) e^{-i xi.x}.
class GridFunction {
public:
  GridFunction(Grid g, ValueSpace s);

  static GridFunction zero(Grid g, ValueSpace s) { return GridFunction(g, s); }
  static GridFunction from_scalar(Grid g, const std::function<cplx(const std::array<double, 2>&)>& f);
  static GridFunction from_components(
      Grid g, ValueSpace s,
      const std::function<cplx(int component, const std::array<double, 2>&)>& f);
  static GridFunction from_spectrum(Grid g, ValueSpace s, std::vector<std::vector<cplx>> spectral);

  const Grid& grid() const { return grid_; }
  const ValueSpace& space() const { return space_; }
  int dim() const { return space_.dim; }
  std::size_t points() const { return grid_.points(); }

  const std::vector<cplx>& plane(int c) const { return values_[std::size_t(c)]; }
  std::vector<cplx>& plane(int c) { return values_[std::size_t(c)]; }

  bool has_spectrum() const { return spectral_.has_value(); }
  const std::vector<std::vector<cplx>>& spectrum() const;

  EVector at(std::size_t idx) const;

  // Pointwise norm field ||f(x)|E|| as a flat array.
  std::vector<double> magnitude_field() const;

  GridFunction& operator+=(const GridFunction& o);
  GridFunction& operator-=(const GridFunction& o);
  GridFunction& operator*=(cplx s);

  friend GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
  friend GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
  friend GridFunction operator*(cplx s, GridFunction f) { return f *= s; }

  double max_abs_diff(const GridFunction& o) const;

private:
  Grid grid_;
  ValueSpace space_;
  std::vector<std::vector<cplx>> values_;
  std::optional<std::vector<std::vector<cplx>>> spectral_;

  friend GridFunction transform_forward(const GridFunction&);
  friend std::vector<std::vector<cplx>> spectrum_of(const GridFunction&);
};

// Forward transform; the result carries both values and spectral planes.
GridFunction transform_forward(const GridFunction& f);

// Spectral planes of f (computed if not cached).
std::vector<std::vector<cplx>> spectrum_of(const GridFunction& f);

// (m(xi) fhat)^{inverse} with the same value space.
GridFunction apply_multiplier(const GridFunction& f, const Multiplier& m);

// L_p quasi-norm of ||f|E|| by Riemann sum, sup over the grid for p = inf.
double lp_norm(const GridFunction& f, double p);

// Convolution with a scalar function: (g*f)^ = ghat * fhat, i.e. the spectral
// product convention (includes the (2pi)^{-n/2} factor in physical space).
GridFunction convolve(const GridFunction& f, const GridFunction& g);

// Discrete Hardy-Littlewood maximal function: sup over balls B_r(y) containing
// x, r from the dyadic set {h, 2h, ..., T/2}, of the ball average of ||f|E||.
GridFunction hardy_littlewood_max(const GridFunction& f);

// max over lattice offsets y of mag(x - y) / (1 + rate*|y|)^a, per grid point.
// Exact on the lattice; the pruned traversal is equivalence-tested against the
// full scan.
std::vector<double> weighted_sup_field(const Grid& g, const std::vector<double>& mag, double rate,
                                       double a);

// Peetre-type maximal function for the analyzing symbol `kernel` at dyadic
// scale j: sup_y ||(kernel(2^{-j}.) fhat)^(x-y)|E|| / (1+2^j|y|)^a.
GridFunction peetre_maximal(const GridFunction& f, const Multiplier& kernel, int j, double a);

// L_p norm of a nonnegative scalar field sampled on the grid.
double lp_norm_field(const Grid& g, const std::vector<double>& field, double p);

} // namespace bk

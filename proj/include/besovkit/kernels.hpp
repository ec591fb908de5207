#pragma once

#include <memory>
#include <vector>

#include "besovkit/grid.hpp"

namespace bk {

// C^inf glue: 0 for t <= 0, 1 for t >= 1, strictly increasing in between.
double smooth_step(double t);
// C^inf cutoff: 1 for r <= 1, 0 for r >= 2.
double bump_rho(double r);

// Smooth dyadic resolution of unity {phi_j}: phi_0 = rho(|xi|),
// phi_j = rho(2^{-j}|xi|) - rho(2^{-j+1}|xi|). Supports are exact,
// sum_{j<=J} phi_j = 1 on {|xi| <= 2^J}.
struct DyadicSystem {
  int J_max = 0;
  std::vector<Multiplier> phi; // phi[j], j = 0..J_max

  const Multiplier& operator[](std::size_t j) const { return phi[j]; }
  std::size_t levels() const { return phi.size(); }
};

DyadicSystem build_dyadic_system(const Grid& grid, int J_max);

// Largest admissible J_max for the grid (annuli must fit inside the lattice).
int max_dyadic_level(const Grid& grid);

// Analysis kernels for local means: compactly supported bumps k0, k^0 with
// nonzero mean (tensor products of a 1D bump supported so that supp is inside
// the unit ball) and k^N = Laplacian^N k^0 with 2N - 1 vanishing moments.
class LocalMeansKernels {
public:
  LocalMeansKernels(const Grid& grid, int N_mom);

  int N_mom() const { return N_mom_; }
  const GridFunction& k0() const { return k0_; }
  const GridFunction& k0_base() const { return k0_base_; }
  const GridFunction& kN() const { return kN_; }

  // 1D factor transform bhat(eta) of the bump, evaluated by direct summation
  // over the support samples (agrees with the lattice DFT at lattice points).
  cplx bhat1(double eta) const;

  // Moment int x^beta Delta^N k^0 dx of the analytic kernel, evaluated by
  // tensor quadrature on a fine 1D table (the analysis grid is too coarse to
  // see these cancellations). Vanishes for |beta| <= 2N - 1.
  double kN_moment(std::array<int, 2> beta) const;

  // Symbol of k0 (the j = 0 analyzer): prod_i bhat1(xi_i).
  Multiplier symbol_k0() const;
  // Symbol of k^N at dyadic scale j: (-|2^{-j}xi|^2)^N prod_i bhat1(2^{-j}xi_i).
  Multiplier symbol_kN(int j) const;

private:
  Grid grid_;
  int N_mom_;
  GridFunction k0_;
  GridFunction k0_base_;
  GridFunction kN_;
  std::shared_ptr<const std::vector<std::pair<double, double>>> support_; // (x, b(x)) 1D samples
  double k0_scale_ = 1.0; // unit symbol at the origin
  double kN_scale_ = 1.0; // unit peak annulus response
  double fine_period_ = 4.0;
};

LocalMeansKernels build_local_means(const Grid& grid, int N_mom);

// xi -> (-1)^k |xi|^k e^{-t|xi|}
Multiplier poisson_multiplier(double t, int k);

// k-th t-derivative of the harmonic extension u(.,t) of f.
GridFunction poisson_extend(const GridFunction& f, double t, int k);

// Smooth window psi with supp psi in d*Q_{0,0} and sum_m psi(x-m) = 1
// identically (tensor product of a 1D normalized bump). Derivatives up to
// order 4 are available through dense spectral tables.
class PartitionWindow {
public:
  PartitionWindow(const Grid& grid, double d);

  double d() const { return d_; }
  const Grid& grid() const { return grid_; }

  double psi1(double u) const;               // 1D factor, exact evaluation
  double psi1_deriv(double u, int q) const;  // q-th derivative, q <= 8, analytic recursion
  double psi(const std::array<double, 2>& x, int n) const;

  // g_gamma(u) = u^gamma psi1(u) and its derivatives via Leibniz.
  double monomial_profile_deriv(double u, int gamma, int q) const;

  // int u^beta (u^gamma psi1)^{(q)}(u) du on the fine table grid
  double profile_moment_1d(int gamma, int q, int beta) const;

  GridFunction sampled(const Grid& g) const;  // psi on the grid (level 0)

private:
  Grid grid_;
  double d_;
  double b(double u) const;
  double table_period_;   // quadrature window for profile moments
  std::size_t table_size_;
};

PartitionWindow build_partition_window(const Grid& grid, double d);

// Building block (-Laplacian)^{(L+1)/2}(x^gamma psi(x)) sampled on the window's
// grid. gamma is a multi-index (second entry ignored for n = 1).
struct QuarkProfile {
  std::array<int, 2> gamma{0, 0};
  int L = -1;
  GridFunction profile;
};

QuarkProfile quark_profile(const PartitionWindow& window, std::array<int, 2> gamma, int L);

// Moment int x^beta (-Delta)^{(L+1)/2}(x^gamma psi) dx of the analytic quark
// profile, by tensor quadrature on the window's fine tables. Vanishes for
// |beta| <= L.
double quark_profile_moment(const PartitionWindow& window, std::array<int, 2> gamma, int L,
                            std::array<int, 2> beta);

} // namespace bk

#pragma once

#include <array>
#include <map>

#include "besovkit/norms.hpp"

namespace bk {

// Localized building block on the cube Q_{nu,m}, stored as sparse samples on
// the global grid (support box d*Q_{nu,m}).
struct Atom {
  enum class Kind { one_K, sp_KL };

  int nu = 0;
  std::array<std::uint64_t, 2> m{0, 0};
  Kind kind = Kind::sp_KL;
  int K = 1;
  int L = -1;
  double d = 1.3; // support box d*Q_{nu,m}

  Grid grid{1, 16, 1.0};
  ValueSpace space = ValueSpace::euclidean(1);
  std::array<std::size_t, 2> start{0, 0};   // first grid index per axis
  std::array<std::size_t, 2> extent{0, 0};  // samples per axis (may wrap)
  std::vector<std::vector<cplx>> samples;   // per component, row-major extent

  std::array<double, 2> center() const; // cube center in grid coordinates
  GridFunction materialize() const;
  void accumulate_into(GridFunction& target, cplx weight) const;
};

// Sample a dense function into the sparse atom support box.
Atom make_atom(const GridFunction& dense, int nu, std::array<std::uint64_t, 2> m, double d,
               Atom::Kind kind, int K, int L);

struct AtomicRepresentation {
  SpaceParams prm;
  int mu = 3;
  double d = 1.3;
  Grid grid{1, 16, 1.0};
  ValueSpace space = ValueSpace::euclidean(1);
  CoefficientField coefficients;
  std::vector<Atom> atoms; // aligned with the coefficient iteration order
};

struct AtomConditionReport {
  double support_leak = 0.0;          // max ||a|| outside d*Q_{nu,m}
  bool support_ok = false;
  std::vector<double> deriv_ratio;    // ||D^alpha a||_inf / bound, |alpha| <= K
  double max_deriv_ratio = 0.0;
  bool derivs_ok = false;             // within (1 + tol)
  std::vector<double> moment_residual; // |int x^beta a|, |beta| <= L
  double max_moment_residual = 0.0;
  bool moments_ok = false;
  bool pass(double deriv_constant = 1.0) const {
    return support_ok && max_deriv_ratio <= deriv_constant * (1.0 + 1e-8) && moments_ok;
  }
};

AtomConditionReport validate_atom(const Atom& a, const SpaceParams& prm);

struct DecomposeOptions {
  int nu_max = 6;
  int gauss_order = 6;
  int margin_t_samples = 3;  // extra sup samples beyond the panel on each side
  bool check_truncation = true;
  double truncation_threshold = 5e-2;
};

AtomicRepresentation harmonic_decompose(const GridFunction& f, const SpaceParams& prm,
                                        const PartitionWindow& window,
                                        const DecomposeOptions& opts = {});

GridFunction reconstruct_atomic(const AtomicRepresentation& rep);

// family norm of the reconstruction divided by the coefficient sequence norm
double synthesis_bound_check(const AtomicRepresentation& rep, const NormToolbox& tb);

// Subatomic representation: per multi-index gamma a coefficient field for the
// plain (M,p)_{-1} branch (rho) and for the (s,p)_L branch (lam), with unit
// directions per entry.
struct QuarkRepresentation {
  SpaceParams prm;
  int gamma_max = 4;
  double M_smooth = 0.0; // smoothness of the rho-branch quarks
  int L = -1;
  int mu = 3;
  double d = 1.3;

  struct Branch {
    CoefficientField coeff;
    std::map<std::pair<int, std::uint64_t>, EVector> dirs;
  };
  struct PerGamma {
    std::array<int, 2> gamma{0, 0};
    Branch rho;
    Branch lam;
  };
  std::vector<PerGamma> per_gamma;

  // sup over stored gamma of 2^{mu|gamma|} (||rho||_b + ||lam||_b); finite by
  // construction, recorded for the decay diagnostics
  double decay_stat = 0.0;

  bool empty() const;
};

QuarkRepresentation quark_decompose(const GridFunction& f, const SpaceParams& prm,
                                    const PartitionWindow& window, int gamma_max,
                                    const DecomposeOptions& opts = {});

QuarkRepresentation quark_decompose_general(const GridFunction& f, const SpaceParams& prm, int M,
                                            const PartitionWindow& window, int gamma_max,
                                            const DecomposeOptions& opts = {});

GridFunction reconstruct_quark(const QuarkRepresentation& rep, const Grid& grid,
                               const PartitionWindow& window);

// Partial reconstruction with |gamma| <= cap (for truncation diagnostics).
GridFunction reconstruct_quark_capped(const QuarkRepresentation& rep, const Grid& grid,
                                      const PartitionWindow& window, int gamma_cap);

struct ConvergenceReport {
  std::vector<int> levels;
  std::vector<double> level_norms; // L2 of the per-level partial sums
  std::vector<double> tails;       // sum of level norms from nu on
  double kappa_est = 0.0;          // fitted geometric rate, tails ~ 2^{-nu kappa}
};

ConvergenceReport convergence_check(const AtomicRepresentation& rep);
ConvergenceReport convergence_check(const QuarkRepresentation& rep, const Grid& grid,
                                    const PartitionWindow& window);

// Boundary constants of the t-integration by parts: f = sum_l c_l d^l_t u(.,1)
// + c * int_0^1 t^{k-1} d^k_t u dt. Exposed for the unit tests.
double harmonic_boundary_coeff(int k, int l); // c_l^k = (-1)^l / l!
double harmonic_integral_coeff(int k);        // c = (-1)^k / (k-1)!

} // namespace bk

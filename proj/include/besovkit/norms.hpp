#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "besovkit/kernels.hpp"

namespace bk {

enum class Family { B, F };

inline const char* family_name(Family f) { return f == Family::B ? "B" : "F"; }

// Smoothness/integrability parameters with the derived thresholds and the
// auxiliary orders used by the analysis operators. make() fills defaults that
// satisfy all preconditions for the given (s, p, q, family).
struct SpaceParams {
  int n = 1;
  double s = 0.0;
  double p = 2.0;
  double q = 2.0;
  Family family = Family::B;

  int K = 1;        // atom differentiability
  int L = -1;       // atom moment order
  double a = 1.0;   // maximal-function exponent
  int mu = 3;       // representation offset
  int k_poisson = 4;

  double sigma_p() const { return double(n) * std::max(1.0 / p - 1.0, 0.0); }
  double sigma_pq() const { return double(n) * std::max(1.0 / std::min(p, q) - 1.0, 0.0); }
  double sigma() const { return family == Family::B ? sigma_p() : sigma_pq(); }

  static SpaceParams make(int n, double s, double p, double q, Family family);
  void validate() const;

  SpaceParams with_s(double new_s) const;
};

// Sparse complex coefficients indexed by level nu and position multi-index m,
// m on the (T * 2^nu)-lattice per axis. Requires an integer period.
struct CoefficientField {
  int n = 1;
  int T_int = 1;
  int nu_max = 0;
  std::map<int, std::map<std::uint64_t, cplx>> levels;

  static CoefficientField make(int n, int T_int) {
    if (T_int < 1) fail(errc::invalid_argument, "CoefficientField: period must be a positive integer");
    return CoefficientField{n, T_int, 0, {}};
  }

  std::uint64_t axis_count(int nu) const { return std::uint64_t(T_int) << nu; }
  std::uint64_t flat(int nu, std::uint64_t m0, std::uint64_t m1 = 0) const {
    return n == 1 ? m0 : m0 * axis_count(nu) + m1;
  }
  void set(int nu, std::uint64_t m0, std::uint64_t m1, cplx v) {
    if (v == cplx(0, 0)) return;
    levels[nu][flat(nu, m0, m1)] = v;
    nu_max = std::max(nu_max, nu);
  }
  bool empty() const {
    for (const auto& [nu, entries] : levels)
      if (!entries.empty()) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// norm engines

double besov_norm(const GridFunction& f, const DyadicSystem& sys, const SpaceParams& prm);
double triebel_norm(const GridFunction& f, const DyadicSystem& sys, const SpaceParams& prm);
double local_means_norm(const GridFunction& f, const LocalMeansKernels& kern,
                        const SpaceParams& prm);

// Analyzer pair for the maximal-function norm: Psi nonvanishing near 0, psi
// nonvanishing on the unit annulus with vanishing derivatives at 0 through
// order S.
struct PeetrePair {
  Multiplier Psi;
  Multiplier psi;
  int S = 1; // vanishing order actually built in is 2*ceil((S+1)/2) - 1
};

PeetrePair make_peetre_pair(int S);

double peetre_norm(const GridFunction& f, const Multiplier& Psi, const Multiplier& psi,
                   const SpaceParams& prm);

struct HarmonicOptions {
  int gauss_order = 8;
  int t_levels = -1;            // dyadic panels [2^-nu-1, 2^-nu], nu <= t_levels; -1: derive
  bool verify_quadrature = true; // re-evaluate at doubled order, 1e-6 relative gate
};

// Low-frequency window for the harmonic norm: 1 on |xi|<=1, 0 on |xi|>3/2.
Multiplier harmonic_window();

double harmonic_norm(const GridFunction& f, const SpaceParams& prm, const Multiplier& phi,
                     const HarmonicOptions& opts = {});

GridFunction lift(const GridFunction& f, double sigma);

double seq_norm_b(const CoefficientField& lam, double p, double q);
double seq_norm_f(const CoefficientField& lam, double p, double q, const Grid& grid);

// ---------------------------------------------------------------------------
// comparison harness

enum class NormTag { besov, triebel, local_means, peetre, harmonic };

const char* norm_tag_name(NormTag t);
std::optional<NormTag> norm_tag_from_name(const std::string& s);

// Everything needed to evaluate the full set of norms on one grid.
struct NormToolbox {
  Grid grid;
  DyadicSystem sys;
  LocalMeansKernels lm;
  PeetrePair peetre;
  Multiplier harm_phi;
  HarmonicOptions harm_opts;

  static NormToolbox make(const Grid& grid, int J_max = -1, int N_mom = 2, int peetre_S = 2);
};

struct NormReport {
  std::vector<std::pair<NormTag, double>> values;
  // pairwise ratios value[i]/value[j], row-major over the selected tags
  std::vector<double> ratios;
  std::size_t count() const { return values.size(); }
};

NormReport compare_norms(const GridFunction& f, const SpaceParams& prm,
                         const std::vector<NormTag>& tags, const NormToolbox& tb);

// Per-function plane cache for sweeps over many (s, p, q) points. Norm
// assembly reuses the analysis planes, which depend only on (tag, level) and
// the maximal/Poisson parameters.
class FunctionAnalysis {
public:
  FunctionAnalysis(const NormToolbox& tb, const GridFunction& f);

  double norm(const SpaceParams& prm, NormTag tag);
  const GridFunction& function() const { return f_; }

private:
  const NormToolbox& tb_;
  GridFunction f_;
  std::map<int, std::vector<double>> besov_mag_;              // j -> |(phi_j fhat)^|
  std::map<int, std::vector<double>> lm_mag_;                 // j -> local-means plane
  std::map<std::pair<int, long>, std::vector<double>> peetre_; // (j, a-key) -> sup field
  struct HarmNode {
    double t, w;
    std::vector<double> mag;
    double lp_cache_p = -1.0;
    double lp_cache = 0.0;
  };
  std::map<int, std::vector<HarmNode>> harm_nodes_;           // k -> quadrature nodes
  std::map<int, double> harm_term0_p_;                        // p -> ||(phi fhat)^||_p

  const std::vector<double>& besov_plane(int j);
  const std::vector<double>& lm_plane(int j);
  const std::vector<double>& peetre_plane(int j, double a);
  std::vector<HarmNode>& harm_planes(int k);
};

} // namespace bk

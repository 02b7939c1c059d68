#pragma once

#include <optional>
#include <vector>

#include "eqtime/kernels.hpp"
#include "eqtime/spectral.hpp"

namespace eqtime {

/// Distribution p_alpha over nonzero energy gaps, built from (rho0, A, H) in
/// the energy eigenbasis. `entries` keeps the raw (j,k) amplitude list for
/// exact dynamics; `atoms` merges gaps equal within gap_agg_tol, carrying the
/// probability weight and the net complex amplitude per distinct gap.
///
/// Q = 0 is not an error: `equilibrated` marks a state already commuting with
/// H on the support of A, for which the time-averaged weak-distinguishability
/// is identically zero.
struct GapDistribution {
  std::vector<PairEntry> entries;
  std::vector<Atom> atoms;  // ascending gap, strictly increasing after merge
  double Q = 0.0;
  double gap_agg_tol = 0.0;
  double discarded_mass = 0.0;
  bool equilibrated = false;

  double prob(std::size_t i) const { return atoms[i].weight / Q; }
  std::size_t n_atoms() const { return atoms.size(); }
};

struct XiProfile {
  std::vector<double> eps_grid;
  std::vector<double> xi_values;
  std::vector<double> a_values;
  std::vector<double> delta_values;
  double sigma_G = 0.0;
};

struct HistogramRow {
  double center = 0.0;
  double probability = 0.0;
};

/// Enumerate all level pairs with |E_j - E_k| > decomp.degeneracy_tol.
/// gap_agg_tol < 0 selects the default 1e-9 * ||H||.
GapDistribution build_gap_distribution(const Mat& rho0_eig, const Mat& a_eig,
                                       const SpectralDecomposition& decomp,
                                       double gap_agg_tol = -1.0,
                                       double amp_floor = 1e-14,
                                       bool parallel = true);

/// Distribution from explicit point masses (synthetic inputs); weights are
/// normalized, Q is set to their sum.
GapDistribution distribution_from_point_masses(const std::vector<double>& values,
                                               const std::vector<double>& weights);

/// Binomial(n_bits, 1/2) over counts k, restricted to the atoms with weight
/// above 1e-18 of the peak (the dropped tail mass is below 1e-12).
GapDistribution binomial_bit_distribution(long long n_bits);

/// Maximum probability of any closed interval of length x; exact two-pointer
/// sweep anchored at the atoms. Throws for x < 0.
double xi(const GapDistribution& dist, double x);

/// delta = xi(eps); a = xi(eps) * sigma / eps.
struct ADelta {
  double a = 0.0;
  double delta = 0.0;
};
ADelta a_delta(const GapDistribution& dist, double eps);

/// Standard deviation of the gaps under p. The mean term vanishes for the
/// symmetric distributions built from Hermitian (rho, A); it is retained so
/// the same code serves synthetic non-centered inputs.
double sigma_spectral(const GapDistribution& dist);

double gap_mean(const GapDistribution& dist);

/// sqrt(|Tr([[rho0,H],H]A)| / (Q ||A||)), computed in the computational
/// basis; lower-bounds sigma_spectral. Returns nullopt when Q = 0.
std::optional<double> sigma_commutator(const Mat& rho0, const Mat& h,
                                       const Mat& a, double q, double norm_a);

/// sqrt(d * Tr(rho0^2)) with d the rank of omega.
double q_purity_bound(double purity, int rank_omega);

double purity(const Mat& rho);

/// 1 / sum_j rho_jj^2 in the energy basis.
double effective_dimension(const Mat& rho_eig);

/// Equal-width binning over [min gap, max gap]; probability is conserved.
std::vector<HistogramRow> histogram(const GapDistribution& dist, int n_bins);

/// Strict local maxima of the histogram after `smooth_passes` of a width-3
/// moving average; reporting diagnostic for unimodality, not an assertion.
int count_histogram_modes(const std::vector<HistogramRow>& hist,
                          int smooth_passes = 2);

/// xi/a/delta on a logarithmic grid of n points spanning
/// [min positive atom spacing / 10, gap span]; specific eps values can be
/// appended by the caller.
XiProfile xi_profile(const GapDistribution& dist, int n_points = 200,
                     const std::vector<double>& extra_eps = {});

}  // namespace eqtime

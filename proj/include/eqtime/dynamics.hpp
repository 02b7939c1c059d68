#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "eqtime/gap_distribution.hpp"
#include "eqtime/model.hpp"
#include "eqtime/spectral.hpp"

namespace eqtime {

struct EvolutionTrace {
  std::vector<double> times;
  std::vector<double> expectation;  // Tr(rho_t A)
  double equilibrium_value = 0.0;   // Tr(omega A)
  std::vector<double> weak_dist;    // |Tr(rho_t A) - Tr(omega A)|^2 / (4||A||^2)
  std::vector<double> running_avg;  // cumulative trapezoid of weak_dist / t
};

struct TypicalityReport {
  int n_samples = 0;
  std::uint64_t seed = 0;
  int d_B_window = 0;
  double correction = 0.0;  // d_S / d_B_window
  std::vector<double> per_sample_avg;
  double mc_mean = 0.0;    // mean of per_sample_avg
  double mc_stderr = 0.0;  // standard error of that mean
  double reference_avg = 0.0;
  std::vector<double> times;
  std::vector<double> mean_weak_dist;    // over samples, per grid time
  std::vector<double> stderr_weak_dist;  // standard error per grid time
  std::vector<double> reference_weak_dist;
  bool bound_holds = true;  // mean <= reference + correction + 3 stderr, all t
  double max_excess = 0.0;  // max over t of mean - (reference + correction)
};

/// Uniform grid of n+1 points on [0, T]. When n <= 0 the default applies:
/// 2000 intervals, densified so the spacing stays below pi/(10 max|gap|).
std::vector<double> time_grid(double T, double max_abs_gap, int n = 0);

/// Tr(rho_t A) per time point from the retained amplitude list:
/// equilibrium + ||A|| * Re sum_alpha v_alpha exp(-i G_alpha t).
EvolutionTrace expectation_trace(const GapDistribution& dist,
                                 double equilibrium_value, double norm_a,
                                 const std::vector<double>& times);

/// Convenience overload building the distribution internally.
EvolutionTrace expectation_trace(const Mat& rho0_eig, const Mat& a_eig,
                                 const SpectralDecomposition& decomp,
                                 const std::vector<double>& times);

double equilibrium_expectation(const Mat& rho0_eig, const Mat& a_eig,
                               const SpectralDecomposition& decomp);

/// <D_A(rho_t, omega)>_T by trapezoid quadrature on a grid with spacing
/// <= min(pi / (10 max|gap|), T/1000); n_points overrides with a denser grid.
double time_average_quadrature(const GapDistribution& dist, double T,
                               long long n_points = 0);

/// Exact spectral form (1/4) sum_{ab} w_a w_b* phi((G_a - G_b) T); refuses
/// (returns nullopt) when the merged atom count exceeds pair_cap.
std::optional<double> time_average_spectral(const GapDistribution& dist,
                                            double T, int pair_cap = 4000);

/// Lorentzian time average, evaluated analytically in the spectral
/// representation via <exp(i nu t)>_{L_T} = exp(i nu T/2 - |nu| T).
std::optional<double> lorentzian_average(const GapDistribution& dist, double T,
                                         int pair_cap = 4000);

/// D_M(rho, sigma) = 1/2 sum_i |Tr(P_i rho) - Tr(P_i sigma)| for a complete
/// orthogonal projector family. Throws when the family does not resolve the
/// identity.
double distinguishability(const std::vector<Projector>& projectors,
                          const Mat& rho, const Mat& sigma);

/// sqrt(N) * sqrt(sum_i avg_i) from per-projector weak-distinguishability
/// time averages.
double distinguishability_bound(const std::vector<double>& per_projector_avg);

/// Haar-typicality Monte Carlo: n_samples Haar-random pure bath states in
/// the window, each evolved exactly; the time-resolved sample mean is
/// compared against the microcanonical reference + d_S/d_B_window.
TypicalityReport haar_typicality(const SystemBathModel& model,
                                 const Mat& system_state, const Mat& a_full,
                                 const SpectralDecomposition& full_decomp,
                                 const SpectralDecomposition& bath_decomp,
                                 double window_center, double window_width,
                                 int n_samples, std::uint64_t seed, double T,
                                 int grid_points = 0);

}  // namespace eqtime

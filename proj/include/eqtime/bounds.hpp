#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eqtime/dynamics.hpp"
#include "eqtime/gap_distribution.hpp"
#include "eqtime/model.hpp"
#include "eqtime/spectral.hpp"

namespace eqtime {

/// pi or the tighter 5 pi / (8 (1 - 1/e)).
double bound_constant(bool tight);

/// <D>_T <= c Q^2 xi_p(1/T).
double concentration_bound(const GapDistribution& dist, double T,
                          bool tight = false);

struct ObservableBound {
  double sigma_form = 0.0;       // pi Q^2 (a/(sigma_G T) + delta)
  double commutator_form = 0.0;  // pi a ||A||^(1/2) Q^(5/2) / (T sqrt|..|) + c delta Q^2
  double a = 0.0;
  double delta = 0.0;
};

/// commutator_value = |Tr([[rho0, H], H] A)|. With a zero commutator and
/// Q > 0 the commutator form is infinite while the sigma form stays finite.
ObservableBound observable_dependent_bound(const GapDistribution& dist, double eps, double T,
                             double norm_a, double commutator_value,
                             bool tight = false);

/// T_eq = pi a ||A||^(1/2) Q^(5/2) / sqrt(commutator_value).
/// Throws std::domain_error("no second-order motion") for a zero commutator.
double t_eq(double a_eps, double norm_a, double q, double commutator_value);

struct BoundCurvePoint {
  double T = 0.0;
  double sigma_form = 0.0;
  double commutator_form = 0.0;
  double concentration = 0.0;
  std::optional<double> exact;  // spectral-form <D>_T when affordable
};

struct BoundReport {
  double Q = 0.0;
  double Q_purity_bound = 0.0;
  double sigma_spectral = 0.0;
  double sigma_commutator = 0.0;
  double commutator_value = 0.0;  // |Tr([[rho0,H],H]A)|, H_S+H_I for system A
  double eps = 0.0;
  double a = 0.0;
  double delta = 0.0;
  double T_eq = 0.0;
  bool t_eq_defined = false;
  double d_eff = 0.0;
  double purity = 0.0;
  double norm_a = 0.0;
  double equilibrium_value = 0.0;
  double discarded_mass = 0.0;
  bool equilibrated = false;
  std::string constant_variant = "pi";
  std::vector<BoundCurvePoint> curve;
};

/// Assemble every observable-dependent bound quantity for a (rho0, A, H)
/// triple. When `h_commutator` is given (e.g. H_S + H_I for a system
/// observable) it is used in the double commutator; T_eq uses the purity
/// bound for Q so it stays computable without the full spectrum.
BoundReport compute_bound_report(const Mat& rho0, const Mat& a_full,
                                 const Mat& h_full,
                                 const SpectralDecomposition& decomp,
                                 double eps, const std::vector<double>& t_grid,
                                 const Mat* h_commutator = nullptr,
                                 bool tight = false, int pair_cap = 4000,
                                 double amp_floor = 1e-14);

struct MicrocanonicalWindow {
  double center = 0.0;  // E_B
  double width = 0.0;   // Delta
  int d_B_window = 0;
  Projector projector_B;
};

MicrocanonicalWindow make_window(const SpectralDecomposition& bath_decomp,
                                 double center, double width);

/// Default window: width = bath span / 4 centered at the median bath level.
MicrocanonicalWindow default_window(const SpectralDecomposition& bath_decomp);

struct TruncationReport {
  double K = 0.0;
  double eta = 0.0;        // sqrt(8 d_S) ||H_I|| K
  double eta_prime = 0.0;  // 2 K ||H_I||
  double window_center = 0.0;
  double window_width = 0.0;  // Delta + 2||H_S|| + eta
  Projector Pi;               // onto the widened window of the full H
  double leakage = 0.0;       // 1 - Tr(rho0 Pi)
  bool precondition_ok = false;  // leakage <= 1/(2K^2)
  double trace_dist = 0.0;       // ||rho0 - Pi rho0 Pi||_1
  int d_trunc_exact = 0;
  double d_trunc_count_bound = 0.0;
  std::optional<double> d_trunc_exp_bound;  // needs a DensityFit
  double Q_untruncated = 0.0;
  double Q_trunc = 0.0;
  double Q2 = 0.0;                        // Q_trunc + 2/K
  double Q2_purity_route = 0.0;           // sqrt(Tr rho0^2 d_trunc) + 2/K
  std::optional<double> Q2_thermal_bound;  // eq. with the fitted beta
  GapDistribution truncated_dist;
  std::vector<int> kept_levels;  // eigenlevel indices inside Pi
};

/// Gentle-measurement truncation of rho0 against the widened spectral window of
/// the full Hamiltonian. Throws std::invalid_argument for K <= 1 and
/// std::runtime_error("truncation window empty") when Pi has rank zero.
TruncationReport truncate(const SystemBathModel& model, const Mat& rho0,
                          const Mat& a_full,
                          const SpectralDecomposition& full_decomp,
                          const SpectralDecomposition& bath_decomp,
                          const MicrocanonicalWindow& window, double K,
                          const std::optional<DensityFit>& bath_fit = {},
                          double trs_rho_s2 = -1.0, double amp_floor = 1e-14);

struct ThermalBathBound {
  double exact_route = 0.0;    // Q2 = Q_trunc + 2/K
  double purity_route = 0.0;   // Q2 = sqrt(Tr rho0^2 d_trunc) + 2/K
  std::optional<double> thermal_route;
  double a = 0.0;
  double delta = 0.0;
};

/// pi a ||A||^(1/2) Q2^(5/2) / (T sqrt(commutator_value)) + pi delta Q2^2
/// + 18/K^2, evaluated for each available Q2 route. a and delta come from
/// `dist_for_xi` (the untruncated distribution by default; pass
/// report.truncated_dist to use the truncated one).
ThermalBathBound thermal_bath_bound(const TruncationReport& report,
                             const GapDistribution& dist_for_xi, double eps,
                             double T, double norm_a, double commutator_value);

/// D_A(rho_t, Pi rho_t Pi) at the sampled times (the truncation closeness
/// closeness check justifying the truncation).
std::vector<double> truncation_distinguishability(
    const Mat& rho0_eig, const Mat& a_eig, const SpectralDecomposition& decomp,
    const std::vector<int>& kept_levels, double norm_a,
    const std::vector<double>& times);

}  // namespace eqtime

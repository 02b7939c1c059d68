#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "eqtime/operator.hpp"
#include "eqtime/spectral.hpp"

namespace eqtime {

/// Spin ring split into system (site 1) + bath (sites 2..L) + interaction.
/// All four Hamiltonians live on the full 2^L space; the *_local copies act
/// on the bare system/bath factors and are what window constructions use.
struct SystemBathModel {
  int L = 0;
  int d_S = 0;
  int d_B = 0;
  Operator H_S, H_B, H_I, H_total;  // full-space
  Mat H_S_local;                    // d_S x d_S
  Mat H_B_local;                    // d_B x d_B
  double omega_scale = 1.0;
  std::vector<double> couplings;  // K_lambda for bonds (1,2), (2,3), ..., (L,1)
  std::string description;
};

enum class BathKind { MaximallyMixed, Microcanonical, HaarPure };

struct InitialStateSpec {
  Mat system_state;  // d_S x d_S density matrix
  BathKind bath_kind = BathKind::MaximallyMixed;
  double window_center = 0.0;  // Microcanonical / HaarPure
  double window_width = 0.0;
  std::uint64_t seed = 0;  // HaarPure
};

/// H = Omega sum_l sigma_l^z + gamma Omega sum_l sigma_l^x sigma_{l+1}^x with
/// periodic closure sigma_{L+1}^x = sigma_1^x. Split: H_S = Omega sigma_1^z,
/// H_I = the two bonds touching site 1, H_B = everything else.
SystemBathModel ising_ring(int L, double omega, double gamma);

/// Same ring with per-bond couplings K_l ~ Normal(gamma_mean, width), drawn
/// from Rng(seed) in bond order (1,2), (2,3), ..., (L,1).
SystemBathModel random_ring(int L, double omega, double gamma_mean,
                            double width, std::uint64_t seed);

/// A_S (x) identity on the bath. Throws on dimension mismatch.
Operator embed_system_observable(const Mat& a_s, const SystemBathModel& model);

/// rho_S (x) rho_B on the full space. For Microcanonical the bath factor is
/// the normalized projector onto the bath levels inside the closed window;
/// for HaarPure it is |phi><phi| with phi a Haar-random unit vector of that
/// window subspace. Throws std::runtime_error for an empty window, naming the
/// window and the nearest bath levels.
Operator build_initial_state(const InitialStateSpec& spec,
                             const SystemBathModel& model,
                             const SpectralDecomposition& bath_decomp);

/// Number of bath levels in the closed window; MaximallyMixed counts the
/// full bath dimension.
int bath_window_dimension(const InitialStateSpec& spec,
                          const SpectralDecomposition& bath_decomp);

}  // namespace eqtime

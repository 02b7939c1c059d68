#pragma once

#include <string>
#include <vector>

#include "eqtime/operator.hpp"

namespace eqtime {

/// Full eigendecomposition of a Hermitian operator, ascending energies.
///
/// Phase convention: each eigenvector is rotated so that its first component
/// with modulus > 1e-8 is real and positive (ties broken by component index).
/// This keeps gap distributions reproducible across runs and platforms.
struct SpectralDecomposition {
  Vec energies;        // ascending
  Mat vectors;         // column j is the eigenvector of energies[j]
  double degeneracy_tol = 0.0;  // absolute; defaults to 1e-9 * ||H||

  int dim() const { return static_cast<int>(energies.size()); }
  double span() const { return energies(dim() - 1) - energies(0); }
};

/// Energy-window projector in the decomposition's original basis.
struct Projector {
  Mat m;
  int rank = 0;
  double center = 0.0;
  double width = 0.0;
  std::string basis_tag;
  std::vector<int> level_indices;  // eigenlevels inside the window
};

/// Exponential density-of-states fit  nu(E) = N exp(beta E).
struct DensityFit {
  double beta = 0.0;
  double norm_const = 0.0;  // N, states per unit energy
  double window_lo = 0.0;
  double window_hi = 0.0;
  double residual = 0.0;  // RMS of log-scale fit errors
  int bins_used = 0;
  int bins_dropped = 0;  // empty bins excluded from the fit
};

/// Throws std::invalid_argument for non-Hermitian input.
SpectralDecomposition diagonalize(const Mat& h, double degeneracy_tol = -1.0);

/// V^dagger X V.
Mat to_eigenbasis(const Mat& x, const SpectralDecomposition& d);

/// V X V^dagger (back to the original basis).
Mat from_eigenbasis(const Mat& x, const SpectralDecomposition& d);

/// Zero every entry of rho (given in the eigenbasis) whose energy gap exceeds
/// degeneracy_tol; degenerate blocks are retained.
Mat dephase(const Mat& rho_eig, const SpectralDecomposition& d);

/// Projector onto the eigenlevels inside [center - width/2, center + width/2]
/// (closed window); rank 0 is allowed.
Projector window_projector(const SpectralDecomposition& d, double center,
                           double width, const std::string& basis_tag = "");

/// ||rho - sigma||_1 = sum of |eigenvalues| of the difference (no 1/2 factor).
double trace_distance(const Mat& rho, const Mat& sigma);

/// Least-squares fit of log(level count / bin width) against bin centers over
/// equal-width bins of the spectrum restricted to [window_lo, window_hi].
/// Empty bins are dropped. Throws std::runtime_error("insufficient spectral
/// data") when fewer than two non-empty bins remain.
DensityFit fit_density_of_states(const SpectralDecomposition& d,
                                 double window_lo, double window_hi,
                                 int n_bins);

/// Number of levels in the closed window (cheap counting helper).
int count_levels(const SpectralDecomposition& d, double lo, double hi);

}  // namespace eqtime

#include "eqtime/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eqtime {

SpectralDecomposition diagonalize(const Mat& h, double degeneracy_tol) {
  if (h.rows() != h.cols()) throw std::invalid_argument("diagonalize: non-square input");
  if (!is_hermitian(h, 1e-10))
    throw std::invalid_argument("diagonalize: input is not Hermitian");

  Eigen::SelfAdjointEigenSolver<Mat> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("diagonalize: eigensolver failed to converge");

  SpectralDecomposition d;
  d.energies = solver.eigenvalues();
  d.vectors = solver.eigenvectors();

  // Canonical phase: first component with modulus > 1e-8 made real positive.
  for (Eigen::Index j = 0; j < d.vectors.cols(); ++j) {
    for (Eigen::Index i = 0; i < d.vectors.rows(); ++i) {
      const Complex x = d.vectors(i, j);
      if (std::abs(x) > 1e-8) {
        d.vectors.col(j) *= std::conj(x) / std::abs(x);
        break;
      }
    }
  }

  const double norm = d.energies.cwiseAbs().maxCoeff();
  d.degeneracy_tol = degeneracy_tol >= 0.0 ? degeneracy_tol : 1e-9 * norm;
  return d;
}

Mat to_eigenbasis(const Mat& x, const SpectralDecomposition& d) {
  if (x.rows() != d.vectors.rows())
    throw std::invalid_argument("to_eigenbasis: dimension mismatch");
  return d.vectors.adjoint() * x * d.vectors;
}

Mat from_eigenbasis(const Mat& x, const SpectralDecomposition& d) {
  if (x.rows() != d.vectors.rows())
    throw std::invalid_argument("from_eigenbasis: dimension mismatch");
  return d.vectors * x * d.vectors.adjoint();
}

Mat dephase(const Mat& rho_eig, const SpectralDecomposition& d) {
  Mat omega = rho_eig;
  const int n = d.dim();
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (std::abs(d.energies(j) - d.energies(k)) > d.degeneracy_tol)
        omega(j, k) = Complex(0, 0);
  return omega;
}

Projector window_projector(const SpectralDecomposition& d, double center,
                           double width, const std::string& basis_tag) {
  if (width < 0) throw std::invalid_argument("window_projector: negative width");
  Projector p;
  p.center = center;
  p.width = width;
  p.basis_tag = basis_tag;
  const int n = d.dim();
  p.m = Mat::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    const double e = d.energies(j);
    if (e >= center - width / 2 && e <= center + width / 2) {
      p.m += d.vectors.col(j) * d.vectors.col(j).adjoint();
      p.level_indices.push_back(j);
    }
  }
  p.rank = static_cast<int>(p.level_indices.size());
  return p;
}

double trace_distance(const Mat& rho, const Mat& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols())
    throw std::invalid_argument("trace_distance: dimension mismatch");
  Eigen::SelfAdjointEigenSolver<Mat> solver(rho - sigma, Eigen::EigenvaluesOnly);
  return solver.eigenvalues().cwiseAbs().sum();
}

DensityFit fit_density_of_states(const SpectralDecomposition& d,
                                 double window_lo, double window_hi,
                                 int n_bins) {
  if (n_bins < 1) throw std::invalid_argument("fit_density_of_states: n_bins < 1");
  if (!(window_hi > window_lo))
    throw std::invalid_argument("fit_density_of_states: empty window");

  const double bin_w = (window_hi - window_lo) / n_bins;
  std::vector<int> counts(n_bins, 0);
  for (int j = 0; j < d.dim(); ++j) {
    const double e = d.energies(j);
    if (e < window_lo || e > window_hi) continue;
    int b = static_cast<int>((e - window_lo) / bin_w);
    b = std::clamp(b, 0, n_bins - 1);
    ++counts[b];
  }

  std::vector<double> xs, ys;  // bin center, log density
  int dropped = 0;
  for (int b = 0; b < n_bins; ++b) {
    if (counts[b] == 0) {
      ++dropped;
      continue;
    }
    xs.push_back(window_lo + (b + 0.5) * bin_w);
    ys.push_back(std::log(counts[b] / bin_w));
  }
  if (xs.size() < 2) throw std::runtime_error("insufficient spectral data");

  const int m = static_cast<int>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < m; ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw std::runtime_error("insufficient spectral data");

  DensityFit fit;
  fit.beta = (m * sxy - sx * sy) / denom;
  const double intercept = (sy - fit.beta * sx) / m;
  fit.norm_const = std::exp(intercept);
  fit.window_lo = window_lo;
  fit.window_hi = window_hi;
  fit.bins_used = m;
  fit.bins_dropped = dropped;

  double rss = 0;
  for (int i = 0; i < m; ++i) {
    const double r = ys[i] - (intercept + fit.beta * xs[i]);
    rss += r * r;
  }
  fit.residual = std::sqrt(rss / m);
  return fit;
}

int count_levels(const SpectralDecomposition& d, double lo, double hi) {
  int n = 0;
  for (int j = 0; j < d.dim(); ++j)
    if (d.energies(j) >= lo && d.energies(j) <= hi) ++n;
  return n;
}

}  // namespace eqtime

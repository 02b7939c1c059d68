#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "eqtime/operator.hpp"

namespace eqtime {

/// One retained (j,k) level pair: gap G = E_j - E_k and amplitude
/// v = rho_jk * A_kj / ||A||.
struct PairEntry {
  std::int32_t j = 0;
  std::int32_t k = 0;
  double gap = 0.0;
  Complex v{0.0, 0.0};
};

struct PairAccumulation {
  std::vector<PairEntry> entries;
  double q = 0.0;              // sum of |v| over retained entries
  double discarded_mass = 0.0; // sum of |v| dropped by the amplitude floor
  std::int64_t n_pairs = 0;    // pairs with a nonzero gap, before the floor
};

/// A point mass of the gap distribution after merging equal gaps: total
/// probability weight and the net complex amplitude at that gap.
struct Atom {
  double gap = 0.0;
  double weight = 0.0;  // sum of |v|, unnormalized (divide by Q for p)
  Complex amp{0.0, 0.0};
};

// The kernels below are the data-parallel hot loops. Each has a _serial
// reference implementation kept for testing and benchmarking; the parallel
// versions chunk their iteration space independently of the thread count and
// reduce chunk partials in fixed order, so results do not depend on the
// number of OpenMP threads.

/// Enumerate all (j,k) with |E_j - E_k| > gap_tol, keep |v| >= amp_floor.
PairAccumulation accumulate_gap_pairs(const Mat& rho_eig, const Mat& a_eig,
                                      const Vec& energies, double norm_a,
                                      double gap_tol, double amp_floor);
PairAccumulation accumulate_gap_pairs_serial(const Mat& rho_eig, const Mat& a_eig,
                                             const Vec& energies, double norm_a,
                                             double gap_tol, double amp_floor);

/// s(t_i) = sum_a amp_a * exp(-i gap_a t_i) for every requested time.
std::vector<Complex> trace_series(const std::vector<Atom>& atoms,
                                  const std::vector<double>& times);
std::vector<Complex> trace_series_serial(const std::vector<Atom>& atoms,
                                         const std::vector<double>& times);

/// phi(x) = (1 - exp(-ix)) / (ix), phi(0) = 1: the finite-time average of
/// exp(-i nu t) over [0, T] evaluated at x = nu T.
Complex phi_finite_time(double x);

/// (1/4) sum_{ab} amp_a conj(amp_b) phi((gap_a - gap_b) T): the exact
/// time-averaged weak-distinguishability of the atom list over [0, T].
double pair_phi_average(const std::vector<Atom>& atoms, double T);
double pair_phi_average_serial(const std::vector<Atom>& atoms, double T);

/// Same quadratic form with the Lorentzian kernel
/// <exp(-i nu t)>_{L_T} = exp(-i nu T/2) exp(-|nu| T).
double pair_lorentzian_average(const std::vector<Atom>& atoms, double T);
double pair_lorentzian_average_serial(const std::vector<Atom>& atoms, double T);

/// Pairwise (tree) summation in index order; deterministic.
double pairwise_sum(const std::vector<double>& xs);

}  // namespace eqtime

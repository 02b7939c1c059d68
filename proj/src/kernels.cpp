#include "eqtime/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace eqtime {

namespace {

// Fixed chunking keeps the reduction order independent of the thread count.
constexpr int kChunks = 64;

std::pair<std::int64_t, std::int64_t> chunk_range(std::int64_t n, int chunk) {
  const std::int64_t lo = n * chunk / kChunks;
  const std::int64_t hi = n * (chunk + 1) / kChunks;
  return {lo, hi};
}

Complex sum_pairwise(std::vector<Complex>& xs) {
  for (std::size_t stride = 1; stride < xs.size(); stride *= 2)
    for (std::size_t i = 0; i + stride < xs.size(); i += 2 * stride)
      xs[i] += xs[i + stride];
  return xs.empty() ? Complex(0, 0) : xs[0];
}

struct RowScanResult {
  std::vector<PairEntry> entries;
  double q = 0.0;
  double discarded = 0.0;
  std::int64_t n_pairs = 0;
};

RowScanResult scan_rows(const Mat& rho_eig, const Mat& a_eig, const Vec& energies,
                        double norm_a, double gap_tol, double amp_floor,
                        std::int64_t row_lo, std::int64_t row_hi) {
  RowScanResult r;
  const std::int64_t n = energies.size();
  for (std::int64_t j = row_lo; j < row_hi; ++j) {
    for (std::int64_t k = 0; k < n; ++k) {
      const double gap = energies(j) - energies(k);
      if (std::abs(gap) <= gap_tol) continue;
      ++r.n_pairs;
      const Complex v = rho_eig(j, k) * a_eig(k, j) / norm_a;
      const double av = std::abs(v);
      if (av < amp_floor) {
        r.discarded += av;
        continue;
      }
      r.entries.push_back({static_cast<std::int32_t>(j),
                           static_cast<std::int32_t>(k), gap, v});
      r.q += av;
    }
  }
  return r;
}

}  // namespace

double pairwise_sum(const std::vector<double>& xs) {
  std::vector<double> work = xs;
  for (std::size_t stride = 1; stride < work.size(); stride *= 2)
    for (std::size_t i = 0; i + stride < work.size(); i += 2 * stride)
      work[i] += work[i + stride];
  return work.empty() ? 0.0 : work[0];
}

PairAccumulation accumulate_gap_pairs_serial(const Mat& rho_eig, const Mat& a_eig,
                                             const Vec& energies, double norm_a,
                                             double gap_tol, double amp_floor) {
  auto r = scan_rows(rho_eig, a_eig, energies, norm_a, gap_tol, amp_floor, 0,
                     energies.size());
  return {std::move(r.entries), r.q, r.discarded, r.n_pairs};
}

PairAccumulation accumulate_gap_pairs(const Mat& rho_eig, const Mat& a_eig,
                                      const Vec& energies, double norm_a,
                                      double gap_tol, double amp_floor) {
  const std::int64_t n = energies.size();
  std::vector<RowScanResult> parts(kChunks);

#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < kChunks; ++c) {
    const auto [lo, hi] = chunk_range(n, c);
    parts[c] = scan_rows(rho_eig, a_eig, energies, norm_a, gap_tol, amp_floor,
                         lo, hi);
  }

  PairAccumulation out;
  std::vector<double> qs(kChunks), ds(kChunks);
  std::size_t total = 0;
  for (int c = 0; c < kChunks; ++c) {
    qs[c] = parts[c].q;
    ds[c] = parts[c].discarded;
    out.n_pairs += parts[c].n_pairs;
    total += parts[c].entries.size();
  }
  out.entries.reserve(total);
  for (int c = 0; c < kChunks; ++c)
    out.entries.insert(out.entries.end(), parts[c].entries.begin(),
                       parts[c].entries.end());
  out.q = pairwise_sum(qs);
  out.discarded_mass = pairwise_sum(ds);
  return out;
}

std::vector<Complex> trace_series_serial(const std::vector<Atom>& atoms,
                                         const std::vector<double>& times) {
  std::vector<Complex> out(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    Complex s(0, 0);
    for (const auto& a : atoms) {
      const double ph = -a.gap * times[i];
      s += a.amp * Complex(std::cos(ph), std::sin(ph));
    }
    out[i] = s;
  }
  return out;
}

std::vector<Complex> trace_series(const std::vector<Atom>& atoms,
                                  const std::vector<double>& times) {
  std::vector<Complex> out(times.size());
  const std::int64_t nt = static_cast<std::int64_t>(times.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < nt; ++i) {
    Complex s(0, 0);
    for (const auto& a : atoms) {
      const double ph = -a.gap * times[i];
      s += a.amp * Complex(std::cos(ph), std::sin(ph));
    }
    out[i] = s;
  }
  return out;
}

Complex phi_finite_time(double x) {
  if (std::abs(x) < 1e-3) {
    // (1 - e^{-ix})/(ix) = sum_n (-ix)^n / (n+1)!
    const Complex mix(0.0, -x);
    Complex term(1.0, 0.0), sum(1.0, 0.0);
    for (int n = 1; n <= 6; ++n) {
      term *= mix / static_cast<double>(n + 1);
      sum += term;
    }
    return sum;
  }
  const Complex ix(0.0, x);
  return (1.0 - std::exp(-ix)) / ix;
}

namespace {

template <typename Kernel>
double pair_average_rows(const std::vector<Atom>& atoms, double T, Kernel kernel,
                         std::int64_t lo, std::int64_t hi) {
  // Exploits Hermitian symmetry of the pair kernel: off-diagonal pairs
  // contribute twice the real part of the upper triangle.
  const std::int64_t n = static_cast<std::int64_t>(atoms.size());
  double acc = 0.0;
  for (std::int64_t a = lo; a < hi; ++a) {
    acc += std::norm(atoms[a].amp);  // kernel(0) = 1 for both kernels
    for (std::int64_t b = a + 1; b < n; ++b) {
      const Complex k = kernel((atoms[a].gap - atoms[b].gap) * T);
      acc += 2.0 * (atoms[a].amp * std::conj(atoms[b].amp) * k).real();
    }
  }
  return acc;
}

Complex lorentzian_kernel(double x) {
  // <e^{-i nu t}>_{L_T} with x = nu T: modulus e^{-|x|}, phase at center T/2.
  const Complex ix(0.0, x);
  return std::exp(-std::abs(x)) * std::exp(-ix / 2.0);
}

template <typename Kernel>
double pair_average_parallel(const std::vector<Atom>& atoms, double T,
                             Kernel kernel) {
  const std::int64_t n = static_cast<std::int64_t>(atoms.size());
  std::vector<double> parts(kChunks, 0.0);
#pragma omp parallel for schedule(dynamic)
  for (int c = 0; c < kChunks; ++c) {
    const auto [lo, hi] = chunk_range(n, c);
    parts[c] = pair_average_rows(atoms, T, kernel, lo, hi);
  }
  return pairwise_sum(parts) / 4.0;
}

}  // namespace

double pair_phi_average_serial(const std::vector<Atom>& atoms, double T) {
  return pair_average_rows(atoms, T, phi_finite_time, 0, atoms.size()) / 4.0;
}

double pair_phi_average(const std::vector<Atom>& atoms, double T) {
  return pair_average_parallel(atoms, T, phi_finite_time);
}

double pair_lorentzian_average_serial(const std::vector<Atom>& atoms, double T) {
  return pair_average_rows(atoms, T, lorentzian_kernel, 0, atoms.size()) / 4.0;
}

double pair_lorentzian_average(const std::vector<Atom>& atoms, double T) {
  return pair_average_parallel(atoms, T, lorentzian_kernel);
}

}  // namespace eqtime

#include "eqtime/gap_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace eqtime {

namespace {

std::vector<Atom> merge_entries(std::vector<PairEntry>& entries, double tol) {
  std::sort(entries.begin(), entries.end(),
            [](const PairEntry& a, const PairEntry& b) {
              if (a.gap != b.gap) return a.gap < b.gap;
              if (a.j != b.j) return a.j < b.j;
              return a.k < b.k;
            });
  std::vector<Atom> atoms;
  std::size_t i = 0;
  while (i < entries.size()) {
    std::size_t j = i + 1;
    while (j < entries.size() && entries[j].gap - entries[i].gap <= tol) ++j;
    Atom a;
    Complex amp(0, 0);
    double w = 0, pos = 0;
    for (std::size_t k = i; k < j; ++k) {
      const double av = std::abs(entries[k].v);
      w += av;
      pos += av * entries[k].gap;
      amp += entries[k].v;
    }
    a.gap = w > 0 ? pos / w : entries[i].gap;
    a.weight = w;
    a.amp = amp;
    atoms.push_back(a);
    i = j;
  }
  return atoms;
}

}  // namespace

GapDistribution build_gap_distribution(const Mat& rho0_eig, const Mat& a_eig,
                                       const SpectralDecomposition& decomp,
                                       double gap_agg_tol, double amp_floor,
                                       bool parallel) {
  if (rho0_eig.rows() != decomp.dim() || a_eig.rows() != decomp.dim())
    throw std::invalid_argument("build_gap_distribution: dimension mismatch");

  const double norm_h = decomp.energies.cwiseAbs().maxCoeff();
  GapDistribution dist;
  dist.gap_agg_tol = gap_agg_tol >= 0 ? gap_agg_tol : 1e-9 * norm_h;

  // ||A|| from the eigenbasis copy (unitary invariance).
  const double norm_a = spectral_norm(a_eig);
  if (norm_a == 0.0)
    throw std::invalid_argument("build_gap_distribution: zero observable");

  auto acc = parallel
                 ? accumulate_gap_pairs(rho0_eig, a_eig, decomp.energies, norm_a,
                                        decomp.degeneracy_tol, amp_floor)
                 : accumulate_gap_pairs_serial(rho0_eig, a_eig, decomp.energies,
                                               norm_a, decomp.degeneracy_tol,
                                               amp_floor);
  dist.entries = std::move(acc.entries);
  dist.Q = acc.q;
  dist.discarded_mass = acc.discarded_mass;

  if (dist.Q <= 0.0) {
    dist.equilibrated = true;
    dist.Q = 0.0;
    return dist;
  }
  dist.atoms = merge_entries(dist.entries, dist.gap_agg_tol);
  return dist;
}

GapDistribution distribution_from_point_masses(const std::vector<double>& values,
                                               const std::vector<double>& weights) {
  if (values.size() != weights.size() || values.empty())
    throw std::invalid_argument("distribution_from_point_masses: bad input");
  GapDistribution dist;
  std::vector<PairEntry> entries(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (weights[i] < 0)
      throw std::invalid_argument("distribution_from_point_masses: negative weight");
    entries[i] = {0, 0, values[i], Complex(weights[i], 0)};
  }
  dist.gap_agg_tol = 0.0;
  dist.atoms = merge_entries(entries, 0.0);
  dist.entries = std::move(entries);
  dist.Q = 0.0;
  for (const auto& a : dist.atoms) dist.Q += a.weight;
  if (dist.Q <= 0) throw std::invalid_argument("distribution_from_point_masses: zero mass");
  return dist;
}

GapDistribution binomial_bit_distribution(long long n_bits) {
  if (n_bits < 1) throw std::invalid_argument("binomial_bit_distribution: n_bits < 1");
  const double n = static_cast<double>(n_bits);
  // log pmf: lgamma(n+1) - lgamma(k+1) - lgamma(n-k+1) - n log 2
  const double log_peak = -0.5 * std::log(M_PI * n / 2.0);  // Stirling at k = n/2
  std::vector<double> values, weights;
  const double sigma = std::sqrt(n) / 2.0;
  const long long lo = std::max(0LL, static_cast<long long>(n / 2 - 10 * sigma));
  const long long hi = std::min(n_bits, static_cast<long long>(n / 2 + 10 * sigma));
  for (long long k = lo; k <= hi; ++k) {
    const double lp = std::lgamma(n + 1) - std::lgamma(static_cast<double>(k) + 1) -
                      std::lgamma(n - static_cast<double>(k) + 1) - n * std::log(2.0);
    if (lp < log_peak + std::log(1e-18)) continue;
    values.push_back(static_cast<double>(k));
    weights.push_back(std::exp(lp));
  }
  return distribution_from_point_masses(values, weights);
}

double xi(const GapDistribution& dist, double x) {
  if (x < 0) throw std::invalid_argument("xi: negative interval length");
  if (dist.equilibrated || dist.atoms.empty()) return 0.0;

  const auto& atoms = dist.atoms;
  const std::size_t n = atoms.size();
  std::vector<double> prefix(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + atoms[i].weight;

  // The maximum over closed intervals [y0, y0 + x] is attained with an atom
  // at the left edge; sweep both pointers once.
  double best = 0.0;
  std::size_t j = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (j < i) j = i;
    while (j + 1 < n && atoms[j + 1].gap <= atoms[i].gap + x) ++j;
    best = std::max(best, prefix[j + 1] - prefix[i]);
  }
  return best / dist.Q;
}

ADelta a_delta(const GapDistribution& dist, double eps) {
  if (!(eps > 0)) throw std::invalid_argument("a_delta: eps must be > 0");
  ADelta out;
  out.delta = xi(dist, eps);
  out.a = out.delta * sigma_spectral(dist) / eps;
  return out;
}

double gap_mean(const GapDistribution& dist) {
  if (dist.equilibrated) return 0.0;
  double m = 0.0;
  for (const auto& a : dist.atoms) m += a.weight * a.gap;
  return m / dist.Q;
}

double sigma_spectral(const GapDistribution& dist) {
  if (dist.equilibrated) return 0.0;
  const double mean = gap_mean(dist);
  double m2 = 0.0;
  for (const auto& a : dist.atoms) m2 += a.weight * a.gap * a.gap;
  m2 /= dist.Q;
  return std::sqrt(std::max(0.0, m2 - mean * mean));
}

std::optional<double> sigma_commutator(const Mat& rho0, const Mat& h,
                                       const Mat& a, double q, double norm_a) {
  if (q <= 0.0) return std::nullopt;
  const double value = std::abs(double_commutator_trace(rho0, h, a));
  return std::sqrt(value / (q * norm_a));
}

double q_purity_bound(double pur, int rank_omega) {
  if (rank_omega < 1) throw std::invalid_argument("q_purity_bound: rank < 1");
  return std::sqrt(rank_omega * pur);
}

double purity(const Mat& rho) { return (rho * rho).trace().real(); }

double effective_dimension(const Mat& rho_eig) {
  double s = 0.0;
  for (Eigen::Index j = 0; j < rho_eig.rows(); ++j)
    s += rho_eig(j, j).real() * rho_eig(j, j).real();
  return s > 0 ? 1.0 / s : 0.0;
}

std::vector<HistogramRow> histogram(const GapDistribution& dist, int n_bins) {
  if (n_bins < 1) throw std::invalid_argument("histogram: n_bins < 1");
  std::vector<HistogramRow> rows(n_bins);
  if (dist.equilibrated || dist.atoms.empty()) return rows;
  const double lo = dist.atoms.front().gap;
  const double hi = dist.atoms.back().gap;
  const double width = hi > lo ? (hi - lo) / n_bins : 1.0;
  for (int b = 0; b < n_bins; ++b)
    rows[b].center = lo + (b + 0.5) * width;
  for (const auto& a : dist.atoms) {
    int b = static_cast<int>((a.gap - lo) / width);
    b = std::clamp(b, 0, n_bins - 1);
    rows[b].probability += a.weight / dist.Q;
  }
  return rows;
}

int count_histogram_modes(const std::vector<HistogramRow>& hist,
                          int smooth_passes) {
  std::vector<double> y(hist.size());
  for (std::size_t i = 0; i < hist.size(); ++i) y[i] = hist[i].probability;
  for (int pass = 0; pass < smooth_passes; ++pass) {
    std::vector<double> s(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      double acc = y[i];
      int cnt = 1;
      if (i > 0) { acc += y[i - 1]; ++cnt; }
      if (i + 1 < y.size()) { acc += y[i + 1]; ++cnt; }
      s[i] = acc / cnt;
    }
    y.swap(s);
  }
  int modes = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double left = i > 0 ? y[i - 1] : -1.0;
    const double right = i + 1 < y.size() ? y[i + 1] : -1.0;
    if (y[i] > left && y[i] > right && y[i] > 0) ++modes;
  }
  return modes;
}

XiProfile xi_profile(const GapDistribution& dist, int n_points,
                     const std::vector<double>& extra_eps) {
  XiProfile prof;
  prof.sigma_G = sigma_spectral(dist);
  if (dist.equilibrated || dist.atoms.empty()) return prof;

  double min_spacing = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < dist.atoms.size(); ++i)
    min_spacing =
        std::min(min_spacing, dist.atoms[i].gap - dist.atoms[i - 1].gap);
  const double span = dist.atoms.back().gap - dist.atoms.front().gap;

  std::vector<double> eps = extra_eps;
  if (dist.atoms.size() > 1 && n_points > 1 && span > 0) {
    const double lo = min_spacing / 10.0;
    const double ratio = std::pow(span / lo, 1.0 / (n_points - 1));
    double e = lo;
    for (int i = 0; i < n_points; ++i, e *= ratio) eps.push_back(e);
  } else if (n_points > 0) {
    eps.push_back(1.0);
  }
  std::sort(eps.begin(), eps.end());
  eps.erase(std::unique(eps.begin(), eps.end()), eps.end());

  for (double e : eps) {
    if (!(e > 0)) continue;
    const auto ad = a_delta(dist, e);
    prof.eps_grid.push_back(e);
    prof.xi_values.push_back(ad.delta);
    prof.a_values.push_back(ad.a);
    prof.delta_values.push_back(ad.delta);
  }
  return prof;
}

}  // namespace eqtime

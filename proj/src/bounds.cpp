#include "eqtime/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace eqtime {

double bound_constant(bool tight) {
  return tight ? 5.0 * M_PI / (8.0 * (1.0 - std::exp(-1.0))) : M_PI;
}

double concentration_bound(const GapDistribution& dist, double T, bool tight) {
  if (!(T > 0)) throw std::invalid_argument("concentration_bound: T <= 0");
  if (dist.equilibrated) return 0.0;
  return bound_constant(tight) * dist.Q * dist.Q * xi(dist, 1.0 / T);
}

ObservableBound observable_dependent_bound(const GapDistribution& dist, double eps, double T,
                             double norm_a, double commutator_value,
                             bool tight) {
  if (!(T > 0)) throw std::invalid_argument("observable_dependent_bound: T <= 0");
  ObservableBound out;
  if (dist.equilibrated) return out;

  const auto ad = a_delta(dist, eps);
  out.a = ad.a;
  out.delta = ad.delta;
  const double q = dist.Q;
  const double sigma = sigma_spectral(dist);
  const double c = bound_constant(tight);

  out.sigma_form = M_PI * q * q * (ad.a / (sigma * T) + ad.delta);
  if (commutator_value > 0) {
    out.commutator_form = M_PI * ad.a * std::sqrt(norm_a) * std::pow(q, 2.5) /
                              (T * std::sqrt(commutator_value)) +
                          c * ad.delta * q * q;
  } else {
    out.commutator_form = std::numeric_limits<double>::infinity();
  }
  return out;
}

double t_eq(double a_eps, double norm_a, double q, double commutator_value) {
  if (!(commutator_value > 0)) throw std::domain_error("no second-order motion");
  return M_PI * a_eps * std::sqrt(norm_a) * std::pow(q, 2.5) /
         std::sqrt(commutator_value);
}

BoundReport compute_bound_report(const Mat& rho0, const Mat& a_full,
                                 const Mat& h_full,
                                 const SpectralDecomposition& decomp,
                                 double eps, const std::vector<double>& t_grid,
                                 const Mat* h_commutator, bool tight,
                                 int pair_cap, double amp_floor) {
  BoundReport rep;
  rep.constant_variant = tight ? "5pi/(8(1-1/e))" : "pi";
  rep.norm_a = spectral_norm(a_full);
  rep.purity = purity(rho0);

  const Mat rho_eig = to_eigenbasis(rho0, decomp);
  const Mat a_eig = to_eigenbasis(a_full, decomp);
  const auto dist =
      build_gap_distribution(rho_eig, a_eig, decomp, -1.0, amp_floor);

  rep.Q = dist.Q;
  rep.discarded_mass = dist.discarded_mass;
  rep.equilibrated = dist.equilibrated;
  rep.d_eff = effective_dimension(rho_eig);
  rep.equilibrium_value = equilibrium_expectation(rho_eig, a_eig, decomp);

  // rank(omega): eigenlevels carrying weight, counted on the diagonal.
  int rank_omega = 0;
  for (int j = 0; j < decomp.dim(); ++j)
    if (rho_eig(j, j).real() > 1e-14) ++rank_omega;
  rank_omega = std::max(rank_omega, 1);
  rep.Q_purity_bound = q_purity_bound(rep.purity, rank_omega);

  const Mat& h_comm = h_commutator ? *h_commutator : h_full;
  rep.commutator_value =
      std::abs(double_commutator_trace(rho0, h_comm, a_full));

  if (rep.equilibrated) return rep;

  rep.sigma_spectral = sigma_spectral(dist);
  rep.sigma_commutator =
      sigma_commutator(rho0, h_comm, a_full, dist.Q, rep.norm_a).value_or(0.0);

  rep.eps = eps;
  const auto ad = a_delta(dist, eps);
  rep.a = ad.a;
  rep.delta = ad.delta;

  if (rep.commutator_value > 0) {
    rep.T_eq = t_eq(ad.a, rep.norm_a, rep.Q_purity_bound, rep.commutator_value);
    rep.t_eq_defined = true;
  }

  for (double T : t_grid) {
    BoundCurvePoint pt;
    pt.T = T;
    const auto b = observable_dependent_bound(dist, eps, T, rep.norm_a,
                                  rep.commutator_value, tight);
    pt.sigma_form = b.sigma_form;
    pt.commutator_form = b.commutator_form;
    pt.concentration = concentration_bound(dist, T, tight);
    pt.exact = time_average_spectral(dist, T, pair_cap);
    rep.curve.push_back(pt);
  }
  return rep;
}

MicrocanonicalWindow make_window(const SpectralDecomposition& bath_decomp,
                                 double center, double width) {
  MicrocanonicalWindow w;
  w.center = center;
  w.width = width;
  w.projector_B = window_projector(bath_decomp, center, width, "H_B");
  w.d_B_window = w.projector_B.rank;
  return w;
}

MicrocanonicalWindow default_window(const SpectralDecomposition& bath_decomp) {
  const int n = bath_decomp.dim();
  const double median = n % 2 == 1
                            ? bath_decomp.energies(n / 2)
                            : 0.5 * (bath_decomp.energies(n / 2 - 1) +
                                     bath_decomp.energies(n / 2));
  return make_window(bath_decomp, median, bath_decomp.span() / 4.0);
}

TruncationReport truncate(const SystemBathModel& model, const Mat& rho0,
                          const Mat& a_full,
                          const SpectralDecomposition& full_decomp,
                          const SpectralDecomposition& bath_decomp,
                          const MicrocanonicalWindow& window, double K,
                          const std::optional<DensityFit>& bath_fit,
                          double trs_rho_s2, double amp_floor) {
  if (!(K > 1)) throw std::invalid_argument("truncate: K must be > 1");

  TruncationReport rep;
  rep.K = K;
  const double norm_hs = spectral_norm(model.H_S_local);
  const double norm_hi = spectral_norm(model.H_I.m);
  rep.eta = std::sqrt(8.0 * model.d_S) * norm_hi * K;
  rep.eta_prime = 2.0 * K * norm_hi;
  rep.window_center = window.center;
  rep.window_width = window.width + 2.0 * norm_hs + rep.eta;

  rep.Pi = window_projector(full_decomp, rep.window_center, rep.window_width,
                            "H_total");
  if (rep.Pi.rank == 0) throw std::runtime_error("truncation window empty");
  rep.d_trunc_exact = rep.Pi.rank;
  rep.kept_levels = rep.Pi.level_indices;

  const Mat rho_eig = to_eigenbasis(rho0, full_decomp);
  const Mat a_eig = to_eigenbasis(a_full, full_decomp);
  const double norm_a = spectral_norm(a_full);

  std::vector<bool> kept(full_decomp.dim(), false);
  for (int j : rep.kept_levels) kept[j] = true;

  double trace_inside = 0.0;
  for (int j : rep.kept_levels) trace_inside += rho_eig(j, j).real();
  rep.leakage = 1.0 - trace_inside;
  rep.precondition_ok = rep.leakage <= 1.0 / (2.0 * K * K) + 1e-12;

  Mat rho_trunc_eig = rho_eig;
  for (int j = 0; j < full_decomp.dim(); ++j)
    for (int k = 0; k < full_decomp.dim(); ++k)
      if (!kept[j] || !kept[k]) rho_trunc_eig(j, k) = Complex(0, 0);
  rep.trace_dist = trace_distance(rho_eig, rho_trunc_eig);

  const auto dist_full =
      build_gap_distribution(rho_eig, a_eig, full_decomp, -1.0, amp_floor);
  rep.Q_untruncated = dist_full.Q;
  rep.truncated_dist =
      build_gap_distribution(rho_trunc_eig, a_eig, full_decomp, -1.0, amp_floor);
  rep.Q_trunc = rep.truncated_dist.Q;
  rep.Q2 = rep.Q_trunc + 2.0 / K;
  rep.Q2_purity_route =
      std::sqrt(purity(rho0) * rep.d_trunc_exact) + 2.0 / K;

  // Count bound: d_S / (1 - 1/K) * (bath levels in the widened window built
  // from the unperturbed spectrum).
  const double half = window.width / 2.0 +
                      (1.0 + std::sqrt(2.0 * model.d_S)) * K * norm_hi + norm_hs;
  const int bath_count = count_levels(bath_decomp, window.center - half,
                                      window.center + half);
  rep.d_trunc_count_bound =
      model.d_S / (1.0 - 1.0 / K) * static_cast<double>(bath_count);

  if (bath_fit) {
    const double beta = bath_fit->beta;
    const double x1 = beta * window.width / 2.0 + beta * norm_hs +
                      (1.0 + std::sqrt(2.0 * model.d_S)) * K * beta * norm_hi;
    const double x2 = beta * window.width / 2.0;
    if (x2 > 0) {
      rep.d_trunc_exp_bound = model.d_S * window.d_B_window /
                              (1.0 - 1.0 / K) * std::sinh(x1) / std::sinh(x2);
    }
    if (trs_rho_s2 > 0) {
      const double num = model.d_S * trs_rho_s2 *
                         std::exp(beta * norm_hs +
                                  (1.0 + std::sqrt(2.0 * model.d_S)) * K * beta *
                                      norm_hi);
      const double den =
          (1.0 - 1.0 / K) * (1.0 - std::exp(-beta * window.width));
      if (den > 0) rep.Q2_thermal_bound = std::sqrt(num / den) + 2.0 / K;
    }
  }
  return rep;
}

ThermalBathBound thermal_bath_bound(const TruncationReport& report,
                             const GapDistribution& dist_for_xi, double eps,
                             double T, double norm_a, double commutator_value) {
  if (!(T > 0)) throw std::invalid_argument("thermal_bath_bound: T <= 0");
  ThermalBathBound out;
  const auto ad = a_delta(dist_for_xi, eps);
  out.a = ad.a;
  out.delta = ad.delta;

  const auto eval = [&](double q2) {
    const double time_term =
        commutator_value > 0
            ? M_PI * ad.a * std::sqrt(norm_a) * std::pow(q2, 2.5) /
                  (T * std::sqrt(commutator_value))
            : std::numeric_limits<double>::infinity();
    return time_term + M_PI * ad.delta * q2 * q2 +
           18.0 / (report.K * report.K);
  };
  out.exact_route = eval(report.Q2);
  out.purity_route = eval(report.Q2_purity_route);
  if (report.Q2_thermal_bound) out.thermal_route = eval(*report.Q2_thermal_bound);
  return out;
}

std::vector<double> truncation_distinguishability(
    const Mat& rho0_eig, const Mat& a_eig, const SpectralDecomposition& decomp,
    const std::vector<int>& kept_levels, double norm_a,
    const std::vector<double>& times) {
  const int n = decomp.dim();
  std::vector<bool> kept(n, false);
  for (int j : kept_levels) kept[j] = true;

  // Difference rho0 - Pi rho0 Pi evolves under the same H since Pi is a
  // spectral projector; all pairs contribute, zero gaps as constants.
  Mat diff = rho0_eig;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k)
      if (kept[j] && kept[k]) diff(j, k) = Complex(0, 0);

  std::vector<PairEntry> entries;
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) {
      const Complex v = diff(j, k) * a_eig(k, j) / norm_a;
      if (std::abs(v) < 1e-16) continue;
      entries.push_back({j, k, decomp.energies(j) - decomp.energies(k), v});
    }
  std::sort(entries.begin(), entries.end(),
            [](const PairEntry& a, const PairEntry& b) { return a.gap < b.gap; });
  std::vector<Atom> atoms;
  std::size_t i = 0;
  while (i < entries.size()) {
    std::size_t j = i + 1;
    Atom a{entries[i].gap, 0.0, Complex(0, 0)};
    while (j < entries.size() &&
           entries[j].gap - entries[i].gap <= decomp.degeneracy_tol)
      ++j;
    for (std::size_t k = i; k < j; ++k) {
      a.amp += entries[k].v;
      a.weight += std::abs(entries[k].v);
    }
    atoms.push_back(a);
    i = j;
  }

  const auto series = trace_series(atoms, times);
  std::vector<double> out(times.size());
  for (std::size_t t = 0; t < times.size(); ++t)
    out[t] = std::norm(series[t]) / 4.0;
  return out;
}

}  // namespace eqtime

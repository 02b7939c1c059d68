#include "eqtime/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "eqtime/rng.hpp"

namespace eqtime {

namespace {

double max_abs_gap(const GapDistribution& dist) {
  double m = 0.0;
  for (const auto& a : dist.atoms) m = std::max(m, std::abs(a.gap));
  return m;
}

}  // namespace

std::vector<double> time_grid(double T, double max_gap, int n) {
  if (!(T >= 0)) throw std::invalid_argument("time_grid: negative T");
  long long intervals = n > 0 ? n : 2000;
  if (n <= 0 && max_gap > 0) {
    const double nyquist = M_PI / (10.0 * max_gap);
    if (T / intervals > nyquist)
      intervals = static_cast<long long>(std::ceil(T / nyquist));
  }
  std::vector<double> ts(intervals + 1);
  for (long long i = 0; i <= intervals; ++i)
    ts[i] = T * static_cast<double>(i) / static_cast<double>(intervals);
  return ts;
}

EvolutionTrace expectation_trace(const GapDistribution& dist,
                                 double equilibrium_value, double norm_a,
                                 const std::vector<double>& times) {
  EvolutionTrace trace;
  trace.times = times;
  trace.equilibrium_value = equilibrium_value;
  const auto series = trace_series(dist.atoms, times);
  trace.expectation.resize(times.size());
  trace.weak_dist.resize(times.size());
  trace.running_avg.resize(times.size());

  for (std::size_t i = 0; i < times.size(); ++i) {
    trace.expectation[i] = equilibrium_value + norm_a * series[i].real();
    trace.weak_dist[i] = std::norm(series[i]) / 4.0;
  }
  // Running trapezoid average; at t=0 the average equals the instantaneous value.
  double integral = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (i == 0) {
      trace.running_avg[i] = trace.weak_dist[i];
      continue;
    }
    integral += 0.5 * (trace.weak_dist[i] + trace.weak_dist[i - 1]) *
                (times[i] - times[i - 1]);
    trace.running_avg[i] = times[i] > 0 ? integral / times[i] : trace.weak_dist[i];
  }
  return trace;
}

double equilibrium_expectation(const Mat& rho0_eig, const Mat& a_eig,
                               const SpectralDecomposition& decomp) {
  return (dephase(rho0_eig, decomp) * a_eig).trace().real();
}

EvolutionTrace expectation_trace(const Mat& rho0_eig, const Mat& a_eig,
                                 const SpectralDecomposition& decomp,
                                 const std::vector<double>& times) {
  const auto dist = build_gap_distribution(rho0_eig, a_eig, decomp);
  const double norm_a = spectral_norm(a_eig);
  return expectation_trace(dist, equilibrium_expectation(rho0_eig, a_eig, decomp),
                           norm_a, times);
}

double time_average_quadrature(const GapDistribution& dist, double T,
                               long long n_points) {
  if (!(T > 0)) throw std::invalid_argument("time_average_quadrature: T <= 0");
  if (dist.equilibrated) return 0.0;
  const double mg = max_abs_gap(dist);
  long long n = n_points;
  if (n <= 0) {
    double spacing = T / 1000.0;
    if (mg > 0) spacing = std::min(spacing, M_PI / (10.0 * mg));
    n = static_cast<long long>(std::ceil(T / spacing));
  }
  const double h = T / static_cast<double>(n);
  std::vector<double> ts(n + 1);
  for (long long i = 0; i <= n; ++i) ts[i] = h * static_cast<double>(i);
  const auto series = trace_series(dist.atoms, ts);
  double integral = 0.0;
  for (long long i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    integral += w * std::norm(series[i]) / 4.0;
  }
  return integral * h / T;
}

std::optional<double> time_average_spectral(const GapDistribution& dist,
                                            double T, int pair_cap) {
  if (!(T > 0)) throw std::invalid_argument("time_average_spectral: T <= 0");
  if (dist.equilibrated) return 0.0;
  if (static_cast<int>(dist.atoms.size()) > pair_cap) return std::nullopt;
  return pair_phi_average(dist.atoms, T);
}

std::optional<double> lorentzian_average(const GapDistribution& dist, double T,
                                         int pair_cap) {
  if (!(T > 0)) throw std::invalid_argument("lorentzian_average: T <= 0");
  if (dist.equilibrated) return 0.0;
  if (static_cast<int>(dist.atoms.size()) > pair_cap) return std::nullopt;
  return pair_lorentzian_average(dist.atoms, T);
}

double distinguishability(const std::vector<Projector>& projectors,
                          const Mat& rho, const Mat& sigma) {
  if (projectors.empty())
    throw std::invalid_argument("distinguishability: empty projector family");
  const int d = static_cast<int>(rho.rows());
  Mat total = Mat::Zero(d, d);
  for (const auto& p : projectors) total += p.m;
  if ((total - Mat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument(
        "distinguishability: projectors do not resolve the identity");
  double s = 0.0;
  for (const auto& p : projectors)
    s += std::abs(((p.m * rho).trace() - (p.m * sigma).trace()).real());
  return 0.5 * s;
}

double distinguishability_bound(const std::vector<double>& per_projector_avg) {
  double s = 0.0;
  for (double v : per_projector_avg) s += v;
  return std::sqrt(static_cast<double>(per_projector_avg.size())) * std::sqrt(s);
}

TypicalityReport haar_typicality(const SystemBathModel& model,
                                 const Mat& system_state, const Mat& a_full,
                                 const SpectralDecomposition& full_decomp,
                                 const SpectralDecomposition& bath_decomp,
                                 double window_center, double window_width,
                                 int n_samples, std::uint64_t seed, double T,
                                 int grid_points) {
  if (n_samples < 2)
    throw std::invalid_argument("haar_typicality: need at least 2 samples");

  TypicalityReport rep;
  rep.n_samples = n_samples;
  rep.seed = seed;

  const double norm_a = spectral_norm(a_full);

  InitialStateSpec mc_spec;
  mc_spec.system_state = system_state;
  mc_spec.bath_kind = BathKind::Microcanonical;
  mc_spec.window_center = window_center;
  mc_spec.window_width = window_width;

  rep.d_B_window = bath_window_dimension(mc_spec, bath_decomp);
  if (rep.d_B_window < 1) throw std::runtime_error("haar_typicality: empty window");
  rep.correction = static_cast<double>(model.d_S) / rep.d_B_window;

  const Mat rho_mc = build_initial_state(mc_spec, model, bath_decomp).m;
  const Mat rho_mc_eig = to_eigenbasis(rho_mc, full_decomp);
  const Mat a_eig = to_eigenbasis(a_full, full_decomp);
  const auto dist_mc = build_gap_distribution(rho_mc_eig, a_eig, full_decomp);

  const auto times = time_grid(T, dist_mc.atoms.empty() ? 0.0
                                                        : std::max(std::abs(dist_mc.atoms.front().gap),
                                                                   std::abs(dist_mc.atoms.back().gap)),
                               grid_points);
  rep.times = times;

  const auto ref_trace = expectation_trace(
      dist_mc, equilibrium_expectation(rho_mc_eig, a_eig, full_decomp), norm_a,
      times);
  rep.reference_weak_dist = ref_trace.weak_dist;

  const auto trapezoid_avg = [&times](const std::vector<double>& ys) {
    double integral = 0.0;
    for (std::size_t i = 1; i < times.size(); ++i)
      integral += 0.5 * (ys[i] + ys[i - 1]) * (times[i] - times[i - 1]);
    return integral / times.back();
  };
  rep.reference_avg = trapezoid_avg(rep.reference_weak_dist);

  std::vector<std::vector<double>> sample_series(n_samples);
  rep.per_sample_avg.assign(n_samples, 0.0);

#pragma omp parallel for schedule(dynamic)
  for (int s = 0; s < n_samples; ++s) {
    InitialStateSpec spec = mc_spec;
    spec.bath_kind = BathKind::HaarPure;
    spec.seed = Rng::derive(seed, static_cast<std::uint64_t>(s));
    const Mat rho_u = build_initial_state(spec, model, bath_decomp).m;
    const Mat rho_u_eig = to_eigenbasis(rho_u, full_decomp);
    const auto dist_u = build_gap_distribution(rho_u_eig, a_eig, full_decomp);
    const auto series = trace_series(dist_u.atoms, times);
    auto& wd = sample_series[s];
    wd.resize(times.size());
    for (std::size_t i = 0; i < times.size(); ++i)
      wd[i] = std::norm(series[i]) / 4.0;
    rep.per_sample_avg[s] = trapezoid_avg(wd);
  }

  // Reductions in fixed sample order, independent of the thread count.
  rep.mean_weak_dist.assign(times.size(), 0.0);
  rep.stderr_weak_dist.assign(times.size(), 0.0);
  for (int s = 0; s < n_samples; ++s)
    for (std::size_t i = 0; i < times.size(); ++i)
      rep.mean_weak_dist[i] += sample_series[s][i];
  for (auto& v : rep.mean_weak_dist) v /= n_samples;
  for (int s = 0; s < n_samples; ++s)
    for (std::size_t i = 0; i < times.size(); ++i) {
      const double d = sample_series[s][i] - rep.mean_weak_dist[i];
      rep.stderr_weak_dist[i] += d * d;
    }
  for (auto& v : rep.stderr_weak_dist)
    v = std::sqrt(v / (static_cast<double>(n_samples) - 1.0) / n_samples);

  double mean = 0.0;
  for (double v : rep.per_sample_avg) mean += v;
  mean /= n_samples;
  double var = 0.0;
  for (double v : rep.per_sample_avg) var += (v - mean) * (v - mean);
  rep.mc_mean = mean;
  rep.mc_stderr = std::sqrt(var / (static_cast<double>(n_samples) - 1.0) / n_samples);

  rep.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < times.size(); ++i) {
    const double excess =
        rep.mean_weak_dist[i] - (rep.reference_weak_dist[i] + rep.correction);
    rep.max_excess = std::max(rep.max_excess, excess);
    if (excess > 3.0 * rep.stderr_weak_dist[i]) rep.bound_holds = false;
  }
  return rep;
}

}  // namespace eqtime

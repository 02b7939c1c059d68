#include "eqtime/pipelines.hpp"

#include <chrono>
#include <cmath>
#include <fstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace eqtime {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void apply_workers(const ExperimentConfig& cfg) {
#ifdef _OPENMP
  // Grid points run inside the sweep's parallel region; the per-point
  // workspace setup must not mutate the global thread count from there.
  if (cfg.workers > 0 && !omp_in_parallel()) omp_set_num_threads(cfg.workers);
#else
  (void)cfg;
#endif
}

Mat load_matrix_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open matrix file: " + path);
  Json doc;
  try {
    f >> doc;
  } catch (const Json::exception& e) {
    throw ConfigError("matrix file parse error: " + std::string(e.what()));
  }
  if (!doc.contains("dim") || !doc.contains("real"))
    throw ConfigError("matrix file: need fields dim, real (and optional imag)");
  const int d = doc.at("dim").get<int>();
  Mat m = Mat::Zero(d, d);
  const auto& re = doc.at("real");
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = re.at(i).at(j).get<double>();
  if (doc.contains("imag")) {
    const auto& im = doc.at("imag");
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        m(i, j) += Complex(0, im.at(i).at(j).get<double>());
  }
  return m;
}

Mat system_state_from_config(const InitialConfig& init) {
  Mat rho(2, 2);
  if (init.system == "up") {
    rho << 1, 0, 0, 0;
  } else if (init.system == "down") {
    rho << 0, 0, 0, 1;
  } else if (init.system == "plus_x") {
    rho << 0.5, 0.5, 0.5, 0.5;
  } else if (init.system == "mixed") {
    rho << 0.5, 0, 0, 0.5;
  } else {
    rho = load_matrix_file(init.path);
  }
  if (!is_hermitian(rho, 1e-10) || std::abs(rho.trace().real() - 1.0) > 1e-10)
    throw ConfigError("initial.system: state is not a density matrix");
  return rho;
}

Json couplings_json(const SystemBathModel& model) {
  Json j = Json::array();
  for (double k : model.couplings) j.push_back(k);
  return j;
}

}  // namespace

Workspace prepare_workspace(const ExperimentConfig& cfg) {
  apply_workers(cfg);
  Workspace ws;
  if (cfg.model.kind == "ising_ring") {
    ws.model = ising_ring(cfg.model.L, cfg.model.omega, cfg.model.gamma);
  } else if (cfg.model.kind == "random_ring") {
    ws.model = random_ring(cfg.model.L, cfg.model.omega, cfg.model.gamma,
                           cfg.model.w, cfg.model.seed);
  } else {
    throw ConfigError("model.kind=binomial has no operator workspace");
  }

  ws.decomp = diagonalize(ws.model.H_total.m, cfg.analysis.degeneracy_tol);
  ws.bath_decomp = diagonalize(ws.model.H_B_local);

  if (cfg.observable.kind == "sx")
    ws.a_sys = pauli(PauliAxis::X);
  else if (cfg.observable.kind == "sz")
    ws.a_sys = pauli(PauliAxis::Z);
  else {
    ws.a_sys = load_matrix_file(cfg.observable.path);
    if (ws.a_sys.rows() != ws.model.d_S)
      throw ConfigError("observable.path: matrix dimension != system dimension");
    if (!is_hermitian(ws.a_sys, 1e-10))
      throw ConfigError("observable.path: matrix is not Hermitian");
  }
  ws.a_full = embed_system_observable(ws.a_sys, ws.model).m;
  ws.norm_a = spectral_norm(ws.a_sys);

  ws.rho_s = system_state_from_config(cfg.initial);
  ws.istate.system_state = ws.rho_s;
  ws.window_center = cfg.initial.center.value_or(
      default_window(ws.bath_decomp).center);
  ws.window_width =
      cfg.initial.width.value_or(default_window(ws.bath_decomp).width);
  if (cfg.initial.bath == "maximally_mixed") {
    ws.istate.bath_kind = BathKind::MaximallyMixed;
  } else if (cfg.initial.bath == "microcanonical") {
    ws.istate.bath_kind = BathKind::Microcanonical;
  } else {
    ws.istate.bath_kind = BathKind::HaarPure;
    ws.bath_commutes = false;
  }
  ws.istate.window_center = ws.window_center;
  ws.istate.window_width = ws.window_width;
  ws.istate.seed = cfg.initial.seed;

  try {
    ws.rho0 = build_initial_state(ws.istate, ws.model, ws.bath_decomp).m;
  } catch (const std::runtime_error& e) {
    throw PreconditionError(e.what());
  }

  ws.rho_eig = to_eigenbasis(ws.rho0, ws.decomp);
  ws.a_eig = to_eigenbasis(ws.a_full, ws.decomp);
  ws.dist = build_gap_distribution(ws.rho_eig, ws.a_eig, ws.decomp,
                                   cfg.analysis.gap_agg_tol,
                                   cfg.analysis.amp_floor);
  ws.equilibrium = equilibrium_expectation(ws.rho_eig, ws.a_eig, ws.decomp);
  return ws;
}

std::vector<double> resolve_t_grid(const AnalysisConfig& a) {
  if (!a.T.empty()) return a.T;
  std::vector<double> ts;
  const int n = std::max(2, a.T_grid);
  const double ratio = std::pow(a.T_max / a.T_min, 1.0 / (n - 1));
  double t = a.T_min;
  for (int i = 0; i < n; ++i, t *= ratio) ts.push_back(t);
  return ts;
}

EpsChoice resolve_eps(const ExperimentConfig& cfg, const GapDistribution& dist,
                      double t_ref) {
  if (!cfg.analysis.eps.empty()) return {cfg.analysis.eps.front(), false};
  // Heuristic: grid-argmin of the sigma-form bound at fixed T.
  const auto prof = xi_profile(dist, cfg.analysis.eps_grid);
  EpsChoice out;
  out.heuristic = true;
  double best = std::numeric_limits<double>::infinity();
  const double sigma = sigma_spectral(dist);
  for (std::size_t i = 0; i < prof.eps_grid.size(); ++i) {
    const double total =
        prof.a_values[i] / (sigma * t_ref) + prof.delta_values[i];
    if (total < best) {
      best = total;
      out.eps = prof.eps_grid[i];
    }
  }
  if (!(out.eps > 0)) out.eps = sigma > 0 ? sigma : 1.0;
  return out;
}

namespace {

Json model_json(const ExperimentConfig& cfg, const Workspace& ws) {
  Json j;
  j["kind"] = cfg.model.kind;
  j["L"] = ws.model.L;
  j["omega"] = cfg.model.omega;
  j["gamma"] = cfg.model.gamma;
  j["w"] = cfg.model.w;
  j["seed"] = cfg.model.seed;
  j["d_S"] = ws.model.d_S;
  j["d_B"] = ws.model.d_B;
  j["couplings"] = couplings_json(ws.model);
  j["description"] = ws.model.description;
  return j;
}

Json tolerances_json(const ExperimentConfig& cfg, const Workspace& ws) {
  Json j;
  j["degeneracy_tol"] = ws.decomp.degeneracy_tol;
  j["gap_agg_tol"] = ws.dist.gap_agg_tol;
  j["amp_floor"] = cfg.analysis.amp_floor;
  j["discarded_amplitude_mass"] = ws.dist.discarded_mass;
  return j;
}

/// The double commutator Hamiltonian: H_S + H_I for system observables when
/// the bath factor commutes with H_B (then H_B drops out of the commutator),
/// else the full H.
Mat commutator_hamiltonian(const Workspace& ws, std::string* tag = nullptr) {
  if (ws.bath_commutes) {
    if (tag) *tag = "H_S+H_I";
    return ws.model.H_S.m + ws.model.H_I.m;
  }
  if (tag) *tag = "H_total";
  return ws.model.H_total.m;
}

}  // namespace

int cmd_spectrum(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  const auto ws = prepare_workspace(cfg);
  Manifest manifest(cfg.echo, cfg.model.seed, cfg.formats);
  const std::filesystem::path out = cfg.out_dir;

  CsvWriter eig({"index", "energy"});
  for (int j = 0; j < ws.decomp.dim(); ++j)
    eig.row({static_cast<double>(j), ws.decomp.energies(j)});
  manifest.record_file(out, "eigenvalues.csv", eig.str());

  CsvWriter beig({"index", "energy"});
  for (int j = 0; j < ws.bath_decomp.dim(); ++j)
    beig.row({static_cast<double>(j), ws.bath_decomp.energies(j)});
  manifest.record_file(out, "bath_eigenvalues.csv", beig.str());

  Json fit_json;
  try {
    const auto fit =
        fit_density_of_states(ws.bath_decomp, ws.bath_decomp.energies(0),
                              ws.bath_decomp.energies(ws.bath_decomp.dim() - 1),
                              cfg.analysis.fit_bins);
    fit_json = {{"beta", fit.beta},
                {"norm_const", fit.norm_const},
                {"window", {fit.window_lo, fit.window_hi}},
                {"residual", fit.residual},
                {"bins_used", fit.bins_used},
                {"bins_dropped", fit.bins_dropped}};
  } catch (const std::runtime_error& e) {
    fit_json = {{"error", e.what()}};
  }
  Json doc;
  doc["model"] = model_json(cfg, ws);
  doc["density_fit"] = fit_json;
  manifest.record_file(out, "density_fit.json", doc.dump(2) + "\n");

  manifest.record_stage("spectrum", seconds_since(t0));
  manifest.set("tolerances", tolerances_json(cfg, ws));
  manifest.write(out);
  return 0;
}

int cmd_gapdist(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  Manifest manifest(cfg.echo, cfg.model.seed, cfg.formats);
  const std::filesystem::path out = cfg.out_dir;

  if (cfg.model.kind == "binomial") {
    apply_workers(cfg);
    const auto dist = binomial_bit_distribution(cfg.model.n_bits);
    std::vector<double> extra = cfg.analysis.eps;
    const auto prof = xi_profile(dist, cfg.analysis.eps_grid, extra);
    CsvWriter xi_csv({"eps", "xi", "a", "delta"});
    for (std::size_t i = 0; i < prof.eps_grid.size(); ++i)
      xi_csv.row({prof.eps_grid[i], prof.xi_values[i], prof.a_values[i],
                  prof.delta_values[i]});
    manifest.record_file(out, "xi_profile.csv", xi_csv.str());
    Json doc;
    doc["kind"] = "binomial";
    doc["n_bits"] = cfg.model.n_bits;
    doc["sigma_G"] = sigma_spectral(dist);
    doc["mean"] = gap_mean(dist);
    doc["n_atoms"] = dist.n_atoms();
    manifest.record_file(out, "gapdist.json", doc.dump(2) + "\n");
    manifest.record_stage("gapdist", seconds_since(t0));
    manifest.write(out);
    return 0;
  }

  const auto ws = prepare_workspace(cfg);
  if (ws.dist.equilibrated) {
    Json doc;
    doc["equilibrated"] = true;
    doc["note"] = "Q = 0: the initial state commutes with H on the support "
                  "of A; the time-averaged weak-distinguishability is 0";
    doc["model"] = model_json(cfg, ws);
    manifest.record_file(out, "equilibrated.json", doc.dump(2) + "\n");
    manifest.record_stage("gapdist", seconds_since(t0));
    manifest.write(out);
    return 0;
  }

  const auto hist = histogram(ws.dist, cfg.analysis.histogram_bins);
  CsvWriter hist_csv({"bin_center", "probability"});
  for (const auto& row : hist) hist_csv.row({row.center, row.probability});
  manifest.record_file(out, "histogram.csv", hist_csv.str());

  const auto prof = xi_profile(ws.dist, cfg.analysis.eps_grid, cfg.analysis.eps);
  CsvWriter xi_csv({"eps", "xi", "a", "delta"});
  for (std::size_t i = 0; i < prof.eps_grid.size(); ++i)
    xi_csv.row({prof.eps_grid[i], prof.xi_values[i], prof.a_values[i],
                prof.delta_values[i]});
  manifest.record_file(out, "xi_profile.csv", xi_csv.str());

  Json doc;
  doc["model"] = model_json(cfg, ws);
  doc["Q"] = ws.dist.Q;
  doc["sigma_G"] = sigma_spectral(ws.dist);
  doc["gap_mean"] = gap_mean(ws.dist);
  doc["n_atoms"] = ws.dist.n_atoms();
  doc["n_entries"] = ws.dist.entries.size();
  doc["d_eff"] = effective_dimension(ws.rho_eig);
  doc["histogram_modes"] = count_histogram_modes(hist);
  doc["discarded_mass"] = ws.dist.discarded_mass;
  manifest.record_file(out, "gapdist.json", doc.dump(2) + "\n");

  manifest.record_stage("gapdist", seconds_since(t0));
  manifest.set("tolerances", tolerances_json(cfg, ws));
  manifest.write(out);
  return 0;
}

namespace {

Json bound_report_json(const BoundReport& rep, const EpsChoice& eps_choice) {
  Json j;
  j["Q"] = rep.Q;
  j["Q_purity_bound"] = rep.Q_purity_bound;
  j["sigma_spectral"] = rep.sigma_spectral;
  j["sigma_commutator"] = rep.sigma_commutator;
  j["commutator_value"] = rep.commutator_value;
  j["eps"] = rep.eps;
  j["eps_choice"] = eps_choice.heuristic ? "grid_argmin_heuristic" : "explicit";
  j["a"] = rep.a;
  j["delta"] = rep.delta;
  j["T_eq"] = rep.t_eq_defined ? Json(rep.T_eq) : Json();
  j["d_eff"] = rep.d_eff;
  j["purity"] = rep.purity;
  j["norm_A"] = rep.norm_a;
  j["equilibrium_value"] = rep.equilibrium_value;
  j["constant_variant"] = rep.constant_variant;
  j["equilibrated"] = rep.equilibrated;
  j["discarded_mass"] = rep.discarded_mass;
  return j;
}

}  // namespace

int cmd_bound(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  const auto ws = prepare_workspace(cfg);
  Manifest manifest(cfg.echo, cfg.model.seed, cfg.formats);
  const std::filesystem::path out = cfg.out_dir;

  const auto t_grid = resolve_t_grid(cfg.analysis);
  const auto eps_choice = resolve_eps(cfg, ws.dist, t_grid.back());
  std::string comm_tag;
  const Mat h_comm = commutator_hamiltonian(ws, &comm_tag);
  const auto rep = compute_bound_report(
      ws.rho0, ws.a_full, ws.model.H_total.m, ws.decomp, eps_choice.eps, t_grid,
      &h_comm, cfg.analysis.tight_constant, cfg.analysis.pair_cap,
      cfg.analysis.amp_floor);

  Json doc = bound_report_json(rep, eps_choice);
  doc["model"] = model_json(cfg, ws);
  doc["commutator_hamiltonian"] = comm_tag;
  Json curve_json = Json::array();
  for (const auto& pt : rep.curve)
    curve_json.push_back({{"T", pt.T},
                          {"sigma_form", pt.sigma_form},
                          {"commutator_form", pt.commutator_form},
                          {"concentration", pt.concentration},
                          {"exact_avg", pt.exact ? Json(*pt.exact) : Json()}});
  doc["bound_curve"] = curve_json;
  manifest.record_file(out, "bound_report.json", doc.dump(2) + "\n");

  CsvWriter curve({"T", "sigma_form", "commutator_form", "concentration", "exact_avg"});
  for (const auto& pt : rep.curve)
    curve.row({pt.T, pt.sigma_form, pt.commutator_form, pt.concentration,
               pt.exact.value_or(std::nan(""))});
  manifest.record_file(out, "bound_curve.csv", curve.str());

  manifest.record_stage("bound", seconds_since(t0));
  manifest.set("tolerances", tolerances_json(cfg, ws));
  manifest.write(out);
  return 0;
}

int cmd_evolve(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  const auto ws = prepare_workspace(cfg);
  Manifest manifest(cfg.echo, cfg.model.seed, cfg.formats);
  const std::filesystem::path out = cfg.out_dir;

  const auto t_grid = resolve_t_grid(cfg.analysis);
  const double t_max = t_grid.back();
  const auto eps_choice = resolve_eps(cfg, ws.dist, t_max);
  std::string comm_tag;
  const Mat h_comm = commutator_hamiltonian(ws, &comm_tag);
  const double comm_value =
      std::abs(double_commutator_trace(ws.rho0, h_comm, ws.a_full));

  double max_gap = 0.0;
  for (const auto& a : ws.dist.atoms) max_gap = std::max(max_gap, std::abs(a.gap));
  const auto times = time_grid(t_max, max_gap, cfg.analysis.evolve_points);
  const auto trace =
      expectation_trace(ws.dist, ws.equilibrium, ws.norm_a, times);

  CsvWriter csv({"t", "expectation", "weak_dist", "running_avg", "concentration_bound",
                 "sigma_form_bound", "commutator_form_bound"});
  for (std::size_t i = 0; i < times.size(); ++i) {
    double p1 = std::nan(""), b_sigma = std::nan(""), b_comm = std::nan("");
    if (times[i] > 0 && !ws.dist.equilibrated) {
      p1 = concentration_bound(ws.dist, times[i], cfg.analysis.tight_constant);
      const auto b = observable_dependent_bound(ws.dist, eps_choice.eps, times[i], ws.norm_a,
                                    comm_value, cfg.analysis.tight_constant);
      b_sigma = b.sigma_form;
      b_comm = b.commutator_form;
    }
    csv.row({times[i], trace.expectation[i], trace.weak_dist[i],
             trace.running_avg[i], p1, b_sigma, b_comm});
  }
  manifest.record_file(out, "evolution.csv", csv.str());

  Json doc;
  doc["model"] = model_json(cfg, ws);
  doc["equilibrium_value"] = ws.equilibrium;
  doc["eps"] = eps_choice.eps;
  doc["commutator_hamiltonian"] = comm_tag;
  doc["grid"] = {{"points", times.size()}, {"t_max", t_max},
                 {"max_gap", max_gap}};
  Json exact = Json::array();
  for (double T : t_grid) {
    const auto v = time_average_spectral(ws.dist, T, cfg.analysis.pair_cap);
    exact.push_back({{"T", T},
                     {"exact_avg", v ? Json(*v) : Json()},
                     {"method", v ? "spectral" : "refused:pair_cap"}});
  }
  doc["exact_averages"] = exact;
  manifest.record_file(out, "evolve_report.json", doc.dump(2) + "\n");

  manifest.record_stage("evolve", seconds_since(t0));
  manifest.set("tolerances", tolerances_json(cfg, ws));
  manifest.write(out);
  return 0;
}

int cmd_truncate(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  const auto ws = prepare_workspace(cfg);
  Manifest manifest(cfg.echo, cfg.model.seed, cfg.formats);
  const std::filesystem::path out = cfg.out_dir;

  const auto window =
      make_window(ws.bath_decomp, ws.window_center, ws.window_width);
  if (window.d_B_window < 1)
    throw PreconditionError("empty microcanonical window");

  std::optional<DensityFit> fit;
  try {
    fit = fit_density_of_states(ws.bath_decomp, ws.bath_decomp.energies(0),
                                ws.bath_decomp.energies(ws.bath_decomp.dim() - 1),
                                cfg.analysis.fit_bins);
  } catch (const std::runtime_error&) {
  }

  TruncationReport rep;
  try {
    rep = truncate(ws.model, ws.rho0, ws.a_full, ws.decomp, ws.bath_decomp,
                   window, cfg.analysis.K, fit, purity(ws.rho_s),
                   cfg.analysis.amp_floor);
  } catch (const std::runtime_error& e) {
    throw PreconditionError(e.what());
  }

  Json doc;
  doc["model"] = model_json(cfg, ws);
  doc["K"] = rep.K;
  doc["eta"] = rep.eta;
  doc["eta_prime"] = rep.eta_prime;
  doc["window"] = {{"center", window.center},
                   {"width", window.width},
                   {"d_B_window", window.d_B_window}};
  doc["window_full"] = {{"center", rep.window_center},
                        {"width", rep.window_width}};
  doc["leakage"] = rep.leakage;
  doc["leakage_precondition"] = 1.0 / (2.0 * rep.K * rep.K);
  doc["precondition_ok"] = rep.precondition_ok;
  if (!rep.precondition_ok)
    doc["precondition_note"] = "gentle-measurement precondition violated; "
                               "the 2/K truncation guarantee is inapplicable, "
                               "measured quantities still reported";
  doc["trace_dist"] = rep.trace_dist;
  doc["trace_dist_bound"] = 2.0 / rep.K;
  doc["d_trunc_exact"] = rep.d_trunc_exact;
  doc["d_trunc_count_bound"] = rep.d_trunc_count_bound;
  doc["d_trunc_exp_bound"] =
      rep.d_trunc_exp_bound ? Json(*rep.d_trunc_exp_bound) : Json();
  doc["Q"] = rep.Q_untruncated;
  doc["Q_trunc"] = rep.Q_trunc;
  doc["Q2"] = rep.Q2;
  doc["Q2_purity_route"] = rep.Q2_purity_route;
  doc["Q2_thermal_bound"] =
      rep.Q2_thermal_bound ? Json(*rep.Q2_thermal_bound) : Json();
  if (fit) doc["bath_fit_beta"] = fit->beta;
  Json kept = Json::array();
  for (int j : rep.kept_levels) kept.push_back(j);
  doc["kept_levels"] = kept;
  manifest.record_file(out, "truncation_report.json", doc.dump(2) + "\n");

  // Truncation closeness along the evolution.
  const auto t_grid = resolve_t_grid(cfg.analysis);
  const auto times = time_grid(t_grid.back(), 0.0, 50);
  const auto dvals = truncation_distinguishability(
      ws.rho_eig, ws.a_eig, ws.decomp, rep.kept_levels, ws.norm_a, times);
  CsvWriter csv({"t", "weak_dist_rho_vs_truncated", "bound_1_over_K2"});
  for (std::size_t i = 0; i < times.size(); ++i)
    csv.row({times[i], dvals[i], 1.0 / (rep.K * rep.K)});
  manifest.record_file(out, "truncation_check.csv", csv.str());

  manifest.record_stage("truncate", seconds_since(t0));
  manifest.set("tolerances", tolerances_json(cfg, ws));
  manifest.write(out);
  return rep.precondition_ok ? 0 : 3;
}

int cmd_typicality(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  const auto ws = prepare_workspace(cfg);
  Manifest manifest(cfg.echo, cfg.model.seed, cfg.formats);
  const std::filesystem::path out = cfg.out_dir;

  const auto t_grid = resolve_t_grid(cfg.analysis);
  TypicalityReport rep;
  try {
    rep = haar_typicality(ws.model, ws.rho_s, ws.a_full, ws.decomp,
                          ws.bath_decomp, ws.window_center, ws.window_width,
                          cfg.analysis.n_samples, cfg.initial.seed,
                          t_grid.back(), cfg.analysis.evolve_points);
  } catch (const std::runtime_error& e) {
    throw PreconditionError(e.what());
  }

  CsvWriter csv({"t", "mc_mean", "mc_stderr", "reference", "allowed"});
  for (std::size_t i = 0; i < rep.times.size(); ++i)
    csv.row({rep.times[i], rep.mean_weak_dist[i], rep.stderr_weak_dist[i],
             rep.reference_weak_dist[i],
             rep.reference_weak_dist[i] + rep.correction +
                 3.0 * rep.stderr_weak_dist[i]});
  manifest.record_file(out, "typicality.csv", csv.str());

  Json doc;
  doc["model"] = model_json(cfg, ws);
  doc["n_samples"] = rep.n_samples;
  doc["seed"] = rep.seed;
  doc["d_B_window"] = rep.d_B_window;
  doc["correction"] = rep.correction;
  doc["mc_mean"] = rep.mc_mean;
  doc["mc_stderr"] = rep.mc_stderr;
  doc["reference_avg"] = rep.reference_avg;
  doc["bound_holds"] = rep.bound_holds;
  doc["max_excess"] = rep.max_excess;
  Json per = Json::array();
  for (double v : rep.per_sample_avg) per.push_back(v);
  doc["per_sample_avg"] = per;
  manifest.record_file(out, "typicality_report.json", doc.dump(2) + "\n");

  manifest.record_stage("typicality", seconds_since(t0));
  manifest.set("tolerances", tolerances_json(cfg, ws));
  manifest.write(out);
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  const auto t0 = Clock::now();
  apply_workers(cfg);
  Manifest manifest(cfg.echo, cfg.model.seed, cfg.formats);
  const std::filesystem::path out = cfg.out_dir;

  std::vector<int> Ls = cfg.sweep.L;
  if (Ls.empty()) Ls.push_back(cfg.model.L);
  std::vector<std::uint64_t> seeds = cfg.sweep.seeds;
  if (seeds.empty()) seeds.push_back(cfg.model.seed);

  struct Point {
    int L;
    std::uint64_t seed;
  };
  std::vector<Point> points;
  for (int L : Ls)
    for (auto s : seeds) points.push_back({L, s});

  const auto t_grid = resolve_t_grid(cfg.analysis);
  std::vector<std::string> header{
      "L",           "seed",           "eps[energy]",
      "xi",          "a",              "delta",
      "Q",           "sigma_G[energy]", "T_eq[1/energy]"};
  for (double T : t_grid)
    header.push_back("exact_avg(T=" + format_full(T) + "[1/energy])");

  std::vector<std::vector<std::vector<double>>> rows(points.size());
  std::vector<std::string> errors(points.size());

#pragma omp parallel for schedule(dynamic)
  for (std::size_t p = 0; p < points.size(); ++p) {
    try {
      ExperimentConfig point_cfg = cfg;
      point_cfg.model.L = points[p].L;
      point_cfg.model.seed = points[p].seed;
      const auto ws = prepare_workspace(point_cfg);
      std::vector<double> eps_list = cfg.analysis.eps;
      if (eps_list.empty())
        eps_list.push_back(resolve_eps(point_cfg, ws.dist, t_grid.back()).eps);

      const Mat h_comm = commutator_hamiltonian(ws);
      const double comm_value =
          std::abs(double_commutator_trace(ws.rho0, h_comm, ws.a_full));
      const double q_bound =
          q_purity_bound(purity(ws.rho0), ws.decomp.dim());

      for (double eps : eps_list) {
        std::vector<double> row{
            static_cast<double>(points[p].L),
            static_cast<double>(points[p].seed), eps};
        if (ws.dist.equilibrated) {
          row.insert(row.end(), {0.0, 0.0, 0.0, 0.0, 0.0, std::nan("")});
          for (std::size_t i = 0; i < t_grid.size(); ++i) row.push_back(0.0);
        } else {
          const auto ad = a_delta(ws.dist, eps);
          const double sigma = sigma_spectral(ws.dist);
          double teq = std::nan("");
          if (comm_value > 0)
            teq = t_eq(ad.a, ws.norm_a, q_bound, comm_value);
          row.insert(row.end(),
                     {ad.delta, ad.a, ad.delta, ws.dist.Q, sigma, teq});
          for (double T : t_grid) {
            const auto v =
                time_average_spectral(ws.dist, T, cfg.analysis.pair_cap);
            row.push_back(v ? *v
                            : time_average_quadrature(ws.dist, T));
          }
        }
        rows[p].push_back(row);
      }
    } catch (const std::exception& e) {
      errors[p] = e.what();
    }
  }

  CsvWriter agg(header);
  for (std::size_t p = 0; p < points.size(); ++p)
    for (const auto& row : rows[p]) agg.row(row);
  manifest.record_file(out, "aggregate.csv", agg.str());

  Json failures = Json::array();
  for (std::size_t p = 0; p < points.size(); ++p)
    if (!errors[p].empty())
      failures.push_back({{"L", points[p].L},
                          {"seed", points[p].seed},
                          {"error", errors[p]}});
  manifest.set("failures", failures);
  manifest.record_stage("sweep", seconds_since(t0));
  manifest.write(out);
  return 0;
}

}  // namespace eqtime

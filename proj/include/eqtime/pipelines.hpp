#pragma once

#include <filesystem>

#include "eqtime/bounds.hpp"
#include "eqtime/config.hpp"
#include "eqtime/dynamics.hpp"
#include "eqtime/model.hpp"
#include "eqtime/report_io.hpp"

namespace eqtime {

/// A fully prepared single-model experiment: model, decompositions, initial
/// state, observable, and the gap distribution, as resolved from a config.
struct Workspace {
  SystemBathModel model;
  SpectralDecomposition decomp;       // of H_total
  SpectralDecomposition bath_decomp;  // of H_B (bath-local)
  Mat a_sys;                          // observable on the system site
  Mat a_full;                         // embedded observable
  Mat rho_s;                          // system initial state
  Mat rho0;                           // full initial state
  Mat rho_eig, a_eig;
  GapDistribution dist;
  double norm_a = 0.0;
  double equilibrium = 0.0;
  double window_center = 0.0;  // resolved microcanonical window (if any)
  double window_width = 0.0;
  bool bath_commutes = true;  // bath factor diagonal in H_B
  InitialStateSpec istate;
};

Workspace prepare_workspace(const ExperimentConfig& cfg);

/// Resolved T grid: explicit list or log-spaced [T_min, T_max].
std::vector<double> resolve_t_grid(const AnalysisConfig& a);

/// eps for single-eps reports: first explicit value, else the grid-argmin of
/// the sigma-form bound at T = max of the T grid (a labeled heuristic).
struct EpsChoice {
  double eps = 0.0;
  bool heuristic = false;
};
EpsChoice resolve_eps(const ExperimentConfig& cfg, const GapDistribution& dist,
                      double t_ref);

// Subcommand pipelines; each writes its files plus manifest.json under
// cfg.out_dir and returns the process exit code.
int cmd_spectrum(const ExperimentConfig& cfg);
int cmd_gapdist(const ExperimentConfig& cfg);
int cmd_bound(const ExperimentConfig& cfg);
int cmd_evolve(const ExperimentConfig& cfg);
int cmd_truncate(const ExperimentConfig& cfg);
int cmd_typicality(const ExperimentConfig& cfg);
int cmd_sweep(const ExperimentConfig& cfg);

}  // namespace eqtime

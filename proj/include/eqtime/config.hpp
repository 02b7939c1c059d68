#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace eqtime {

/// Validation failure: CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Numeric precondition violated (empty window, gentle-measurement failure):
/// CLI exit code 3.
struct PreconditionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelConfig {
  std::string kind = "ising_ring";  // ising_ring | random_ring | binomial
  int L = 5;
  double omega = 1.0;
  double gamma = 1.1;
  double w = 0.0;
  std::uint64_t seed = 1;
  long long n_bits = 2000000;  // binomial mode
};

struct ObservableConfig {
  std::string kind = "sx";  // sx | sz | file
  std::string path;
};

struct InitialConfig {
  std::string system = "up";  // up | down | plus_x | mixed | file
  std::string path;
  std::string bath = "maximally_mixed";  // maximally_mixed | microcanonical | haar_pure
  std::optional<double> center;          // default: bath spectrum median
  std::optional<double> width;           // default: bath span / 4
  std::uint64_t seed = 1;
};

struct AnalysisConfig {
  std::vector<double> eps;  // explicit eps values; empty -> grid only
  int eps_grid = 200;
  double K = 10.0;
  std::vector<double> T;  // explicit T values
  int T_grid = 20;        // log-spaced grid size when T empty
  double T_min = 0.1;
  double T_max = 100.0;
  bool tight_constant = false;
  int pair_cap = 4000;
  double amp_floor = 1e-14;
  double gap_agg_tol = -1.0;     // < 0: 1e-9 ||H||
  double degeneracy_tol = -1.0;  // < 0: 1e-9 ||H||
  bool use_truncated_distribution = false;
  int fit_bins = 20;
  int histogram_bins = 61;
  int n_samples = 200;  // typicality
  int evolve_points = 2000;
};

struct SweepConfig {
  std::vector<int> L;
  std::vector<std::uint64_t> seeds;
};

struct ExperimentConfig {
  ModelConfig model;
  ObservableConfig observable;
  InitialConfig initial;
  AnalysisConfig analysis;
  SweepConfig sweep;
  std::string out_dir = "out";
  std::vector<std::string> formats{"csv", "json"};  // emitted data formats
  int workers = 0;  // 0 = auto
  int max_L = 12;
  bool allow_large = false;

  nlohmann::json echo;  // the merged document, for manifests
};

/// Parse + validate a config document. Throws ConfigError with a field-level
/// message on invalid input.
ExperimentConfig parse_config(const nlohmann::json& doc);

ExperimentConfig load_config_file(const std::string& path);

/// Apply a KEY=VALUE override with a dotted path (e.g. model.L=7).
void apply_override(nlohmann::json& doc, const std::string& assignment);

}  // namespace eqtime

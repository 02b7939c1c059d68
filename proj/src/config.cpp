#include "eqtime/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace eqtime {

namespace {

using Json = nlohmann::json;

void require_finite(double v, const std::string& field) {
  if (!std::isfinite(v)) throw ConfigError(field + ": must be finite");
}

template <typename T>
T get_or(const Json& j, const std::string& key, T fallback,
         const std::string& ctx) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    throw ConfigError(ctx + "." + key + ": wrong type");
  }
}

std::vector<double> get_list(const Json& j, const std::string& key,
                             const std::string& ctx) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  if (!j.at(key).is_array()) throw ConfigError(ctx + "." + key + ": expected array");
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw ConfigError(ctx + "." + key + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

void check_keys(const Json& j, const std::set<std::string>& allowed,
                const std::string& ctx) {
  if (!j.is_object()) throw ConfigError(ctx + ": expected object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!allowed.count(it.key()))
      throw ConfigError(ctx + "." + it.key() + ": unknown field");
}

}  // namespace

ExperimentConfig parse_config(const Json& doc) {
  ExperimentConfig cfg;
  cfg.echo = doc;
  check_keys(doc,
             {"model", "observable", "initial", "analysis", "sweep", "output",
              "parallelism", "limits"},
             "config");

  if (doc.contains("model")) {
    const auto& m = doc.at("model");
    check_keys(m, {"kind", "L", "omega", "gamma", "w", "seed", "n_bits"},
               "model");
    cfg.model.kind = get_or<std::string>(m, "kind", cfg.model.kind, "model");
    if (cfg.model.kind != "ising_ring" && cfg.model.kind != "random_ring" &&
        cfg.model.kind != "binomial")
      throw ConfigError("model.kind: expected ising_ring | random_ring | binomial");
    cfg.model.L = get_or<int>(m, "L", cfg.model.L, "model");
    cfg.model.omega = get_or<double>(m, "omega", cfg.model.omega, "model");
    cfg.model.gamma = get_or<double>(m, "gamma", cfg.model.gamma, "model");
    cfg.model.w = get_or<double>(m, "w", cfg.model.w, "model");
    cfg.model.seed = get_or<std::uint64_t>(m, "seed", cfg.model.seed, "model");
    cfg.model.n_bits = get_or<long long>(m, "n_bits", cfg.model.n_bits, "model");
    require_finite(cfg.model.omega, "model.omega");
    require_finite(cfg.model.gamma, "model.gamma");
    require_finite(cfg.model.w, "model.w");
    if (cfg.model.kind != "binomial" && cfg.model.L < 2)
      throw ConfigError("model.L: must be >= 2");
    if (cfg.model.w < 0) throw ConfigError("model.w: must be >= 0");
    if (cfg.model.n_bits < 1) throw ConfigError("model.n_bits: must be >= 1");
  }

  if (doc.contains("observable")) {
    const auto& o = doc.at("observable");
    check_keys(o, {"kind", "path"}, "observable");
    cfg.observable.kind = get_or<std::string>(o, "kind", cfg.observable.kind, "observable");
    cfg.observable.path = get_or<std::string>(o, "path", "", "observable");
    if (cfg.observable.kind != "sx" && cfg.observable.kind != "sz" &&
        cfg.observable.kind != "file")
      throw ConfigError("observable.kind: expected sx | sz | file");
    if (cfg.observable.kind == "file" && cfg.observable.path.empty())
      throw ConfigError("observable.path: required for kind=file");
  }

  if (doc.contains("initial")) {
    const auto& i = doc.at("initial");
    check_keys(i, {"system", "path", "bath", "center", "width", "seed"},
               "initial");
    cfg.initial.system = get_or<std::string>(i, "system", cfg.initial.system, "initial");
    cfg.initial.path = get_or<std::string>(i, "path", "", "initial");
    cfg.initial.bath = get_or<std::string>(i, "bath", cfg.initial.bath, "initial");
    if (i.contains("center")) cfg.initial.center = i.at("center").get<double>();
    if (i.contains("width")) cfg.initial.width = i.at("width").get<double>();
    cfg.initial.seed = get_or<std::uint64_t>(i, "seed", cfg.initial.seed, "initial");
    const std::set<std::string> systems{"up", "down", "plus_x", "mixed", "file"};
    if (!systems.count(cfg.initial.system))
      throw ConfigError("initial.system: expected up | down | plus_x | mixed | file");
    if (cfg.initial.system == "file" && cfg.initial.path.empty())
      throw ConfigError("initial.path: required for system=file");
    const std::set<std::string> baths{"maximally_mixed", "microcanonical", "haar_pure"};
    if (!baths.count(cfg.initial.bath))
      throw ConfigError("initial.bath: expected maximally_mixed | microcanonical | haar_pure");
    if (cfg.initial.width && *cfg.initial.width < 0)
      throw ConfigError("initial.width: must be >= 0");
  }

  if (doc.contains("analysis")) {
    const auto& a = doc.at("analysis");
    check_keys(a,
               {"eps", "eps_grid", "K", "T", "T_grid", "T_min", "T_max",
                "tight_constant", "pair_cap", "amp_floor", "gap_agg_tol",
                "degeneracy_tol", "use_truncated_distribution", "fit_bins",
                "histogram_bins", "n_samples", "evolve_points"},
               "analysis");
    cfg.analysis.eps = get_list(a, "eps", "analysis");
    cfg.analysis.eps_grid = get_or<int>(a, "eps_grid", cfg.analysis.eps_grid, "analysis");
    cfg.analysis.K = get_or<double>(a, "K", cfg.analysis.K, "analysis");
    cfg.analysis.T = get_list(a, "T", "analysis");
    cfg.analysis.T_grid = get_or<int>(a, "T_grid", cfg.analysis.T_grid, "analysis");
    cfg.analysis.T_min = get_or<double>(a, "T_min", cfg.analysis.T_min, "analysis");
    cfg.analysis.T_max = get_or<double>(a, "T_max", cfg.analysis.T_max, "analysis");
    cfg.analysis.tight_constant =
        get_or<bool>(a, "tight_constant", false, "analysis");
    cfg.analysis.pair_cap = get_or<int>(a, "pair_cap", cfg.analysis.pair_cap, "analysis");
    cfg.analysis.amp_floor = get_or<double>(a, "amp_floor", cfg.analysis.amp_floor, "analysis");
    cfg.analysis.gap_agg_tol =
        get_or<double>(a, "gap_agg_tol", cfg.analysis.gap_agg_tol, "analysis");
    cfg.analysis.degeneracy_tol =
        get_or<double>(a, "degeneracy_tol", cfg.analysis.degeneracy_tol, "analysis");
    cfg.analysis.use_truncated_distribution =
        get_or<bool>(a, "use_truncated_distribution", false, "analysis");
    cfg.analysis.fit_bins = get_or<int>(a, "fit_bins", cfg.analysis.fit_bins, "analysis");
    cfg.analysis.histogram_bins =
        get_or<int>(a, "histogram_bins", cfg.analysis.histogram_bins, "analysis");
    cfg.analysis.n_samples = get_or<int>(a, "n_samples", cfg.analysis.n_samples, "analysis");
    cfg.analysis.evolve_points =
        get_or<int>(a, "evolve_points", cfg.analysis.evolve_points, "analysis");
    for (double e : cfg.analysis.eps)
      if (!(e > 0)) throw ConfigError("analysis.eps: values must be > 0");
    for (double t : cfg.analysis.T)
      if (!(t > 0)) throw ConfigError("analysis.T: values must be > 0");
    if (!(cfg.analysis.K > 1)) throw ConfigError("analysis.K: must be > 1");
    if (cfg.analysis.pair_cap < 1) throw ConfigError("analysis.pair_cap: must be >= 1");
    if (cfg.analysis.n_samples < 2) throw ConfigError("analysis.n_samples: must be >= 2");
    if (!(cfg.analysis.T_min > 0) || !(cfg.analysis.T_max >= cfg.analysis.T_min))
      throw ConfigError("analysis.T_min/T_max: need 0 < T_min <= T_max");
  }

  if (doc.contains("sweep")) {
    const auto& s = doc.at("sweep");
    check_keys(s, {"L", "seeds"}, "sweep");
    if (s.contains("L"))
      for (const auto& v : s.at("L")) cfg.sweep.L.push_back(v.get<int>());
    if (s.contains("seeds"))
      for (const auto& v : s.at("seeds"))
        cfg.sweep.seeds.push_back(v.get<std::uint64_t>());
    for (int l : cfg.sweep.L)
      if (l < 2) throw ConfigError("sweep.L: values must be >= 2");
  }

  if (doc.contains("output")) {
    const auto& o = doc.at("output");
    check_keys(o, {"dir", "formats"}, "output");
    cfg.out_dir = get_or<std::string>(o, "dir", cfg.out_dir, "output");
    if (o.contains("formats")) {
      cfg.formats.clear();
      for (const auto& f : o.at("formats")) {
        const auto s = f.get<std::string>();
        if (s != "csv" && s != "json")
          throw ConfigError("output.formats: expected csv | json");
        cfg.formats.push_back(s);
      }
      if (cfg.formats.empty())
        throw ConfigError("output.formats: must not be empty");
    }
  }
  if (doc.contains("parallelism")) {
    const auto& p = doc.at("parallelism");
    check_keys(p, {"workers"}, "parallelism");
    cfg.workers = get_or<int>(p, "workers", 0, "parallelism");
    if (cfg.workers < 0) throw ConfigError("parallelism.workers: must be >= 0");
  }
  if (doc.contains("limits")) {
    const auto& l = doc.at("limits");
    check_keys(l, {"max_L", "allow_large"}, "limits");
    cfg.max_L = get_or<int>(l, "max_L", cfg.max_L, "limits");
    cfg.allow_large = get_or<bool>(l, "allow_large", false, "limits");
  }

  const int max_relevant_L =
      std::max(cfg.model.L,
               cfg.sweep.L.empty() ? 0 : *std::max_element(cfg.sweep.L.begin(),
                                                           cfg.sweep.L.end()));
  if (cfg.model.kind != "binomial" && max_relevant_L > cfg.max_L &&
      !cfg.allow_large)
    throw ConfigError("model.L exceeds limits.max_L (" +
                      std::to_string(cfg.max_L) +
                      "); set limits.allow_large=true to acknowledge the memory cost");
  return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  Json doc;
  try {
    f >> doc;
  } catch (const Json::exception& e) {
    throw ConfigError("config parse error in " + path + ": " + e.what());
  }
  return parse_config(doc);
}

void apply_override(Json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos)
    throw ConfigError("override: expected KEY=VALUE, got '" + assignment + "'");
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  Json* node = &doc;
  std::size_t pos = 0;
  while (true) {
    const auto dot = key.find('.', pos);
    const std::string part = key.substr(pos, dot - pos);
    if (part.empty()) throw ConfigError("override: empty path segment in " + key);
    if (dot == std::string::npos) {
      Json parsed = Json::parse(value, nullptr, false);
      (*node)[part] = parsed.is_discarded() ? Json(value) : parsed;
      return;
    }
    node = &(*node)[part];
    pos = dot + 1;
  }
}

}  // namespace eqtime

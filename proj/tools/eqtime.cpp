#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "eqtime/config.hpp"
#include "eqtime/pipelines.hpp"

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir;
  int workers = -1;
  long long seed = -1;
  std::vector<std::string> overrides;
};

void attach_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--out", args.out_dir, "output directory");
  cmd->add_option("--workers", args.workers, "worker count (0 = auto)");
  cmd->add_option("--seed", args.seed, "model seed override");
  cmd->add_option("--override", args.overrides,
                  "config override KEY=VALUE (dotted path, repeatable)");
}

eqtime::ExperimentConfig build_config(const CommonArgs& args) {
  nlohmann::json doc = nlohmann::json::object();
  if (!args.config_path.empty()) {
    std::ifstream f(args.config_path);
    if (!f) throw eqtime::ConfigError("cannot open config file: " + args.config_path);
    try {
      f >> doc;
    } catch (const nlohmann::json::exception& e) {
      throw eqtime::ConfigError("config parse error: " + std::string(e.what()));
    }
  }
  for (const auto& o : args.overrides) eqtime::apply_override(doc, o);
  if (!args.out_dir.empty()) doc["output"]["dir"] = args.out_dir;
  if (args.workers >= 0) doc["parallelism"]["workers"] = args.workers;
  if (args.seed >= 0) doc["model"]["seed"] = static_cast<std::uint64_t>(args.seed);
  return eqtime::parse_config(doc);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"equilibration-time bound toolkit for finite spin systems"};
  app.require_subcommand(1);

  struct Sub {
    const char* name;
    const char* help;
    int (*run)(const eqtime::ExperimentConfig&);
  };
  const Sub subs[] = {
      {"spectrum", "eigenvalues and bath density-of-states fit", eqtime::cmd_spectrum},
      {"gapdist", "gap distribution: histogram and xi/a/delta profile", eqtime::cmd_gapdist},
      {"bound", "equilibration-time bound report and curve", eqtime::cmd_bound},
      {"evolve", "exact evolution trace with interleaved bounds", eqtime::cmd_evolve},
      {"truncate", "microcanonical truncation report", eqtime::cmd_truncate},
      {"typicality", "Haar-typicality Monte Carlo", eqtime::cmd_typicality},
      {"sweep", "parameter sweep with aggregate CSV", eqtime::cmd_sweep},
  };

  std::vector<CommonArgs> args(std::size(subs));
  std::vector<CLI::App*> cmds;
  for (std::size_t i = 0; i < std::size(subs); ++i) {
    auto* cmd = app.add_subcommand(subs[i].name, subs[i].help);
    attach_common(cmd, args[i]);
    cmds.push_back(cmd);
  }

  CLI11_PARSE(app, argc, argv);

  for (std::size_t i = 0; i < std::size(subs); ++i) {
    if (!cmds[i]->parsed()) continue;
    try {
      const auto cfg = build_config(args[i]);
      return subs[i].run(cfg);
    } catch (const eqtime::ConfigError& e) {
      std::fprintf(stderr, "config error: %s\n", e.what());
      return 2;
    } catch (const eqtime::PreconditionError& e) {
      std::fprintf(stderr, "numeric precondition violated: %s\n", e.what());
      return 3;
    } catch (const std::exception& e) {
      std::fprintf(stderr, "internal error: %s\n", e.what());
      return 4;
    }
  }
  return 2;
}

#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ebh/runner.hpp"
#include "ebh/scenario.hpp"

namespace {

struct CommonArgs {
  std::string preset;
  std::string config_path;
  std::string out_root = "runs";
  std::optional<double> dt;
  std::optional<int> n_sites;
  int threads = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--preset", args.preset, "bundled configuration name");
  cmd->add_option("--config", args.config_path, "path to a configuration file")
      ->check(CLI::ExistingFile);
  cmd->add_option("--out", args.out_root, "output root directory")
      ->capture_default_str();
  cmd->add_option("--dt", args.dt, "override the integrator time-step cap");
  cmd->add_option("--n-sites", args.n_sites, "override the lattice size");
  cmd->add_option("--threads", args.threads, "worker threads (0 = library default)");
}

ebh::ScenarioConfig load_config(const CommonArgs& args) {
  if (!args.preset.empty() && !args.config_path.empty())
    throw CLI::ValidationError("use either --preset or --config, not both");
  if (!args.preset.empty()) return ebh::load_preset(args.preset);
  if (!args.config_path.empty()) return ebh::load_scenario_file(args.config_path);
  return {};
}

ebh::RunOptions run_options(const CommonArgs& args) {
  ebh::RunOptions opts;
  opts.out_root = args.out_root;
  opts.threads = args.threads;
  opts.dt_override = args.dt;
  opts.n_sites_override = args.n_sites;
  return opts;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bound-pair dynamics in the tilted extended Bose-Hubbard chain"};
  app.require_subcommand(1);

  struct Verb {
    const char* name;
    const char* help;
    ebh::ScenarioKind kind;
  };
  const std::vector<Verb> verbs = {
      {"band", "compute a bound-pair band structure", ebh::ScenarioKind::band},
      {"phase-map", "raster the bound-state phase regions", ebh::ScenarioKind::phase_map},
      {"evolve", "evolve one wavepacket", ebh::ScenarioKind::evolve},
      {"filter", "run the two-packet pulsed-field filter", ebh::ScenarioKind::filter},
  };

  std::vector<CommonArgs> verb_args(verbs.size());
  std::vector<CLI::App*> verb_cmds;
  for (std::size_t i = 0; i < verbs.size(); ++i) {
    CLI::App* cmd = app.add_subcommand(verbs[i].name, verbs[i].help);
    add_common(cmd, verb_args[i]);
    verb_cmds.push_back(cmd);
  }

  CommonArgs sweep_args;
  std::string sweep_pointer;
  std::vector<double> sweep_values;
  CLI::App* sweep_cmd =
      app.add_subcommand("sweep", "re-run a scenario over a range of one parameter");
  add_common(sweep_cmd, sweep_args);
  sweep_cmd
      ->add_option("--pointer", sweep_pointer,
                   "JSON pointer of the swept field, e.g. /field/f0")
      ->required();
  sweep_cmd->add_option("--values", sweep_values, "comma-separated values")
      ->required()
      ->delimiter(',');

  CLI::App* presets_cmd = app.add_subcommand("presets", "inspect bundled configurations");
  presets_cmd->require_subcommand(1);
  CLI::App* presets_list = presets_cmd->add_subcommand("list", "list preset names");

  CLI11_PARSE(app, argc, argv);

  try {
    for (std::size_t i = 0; i < verbs.size(); ++i) {
      if (!verb_cmds[i]->parsed()) continue;
      ebh::ScenarioConfig config = load_config(verb_args[i]);
      config.kind = verbs[i].kind;  // the verb decides what to produce
      const ebh::RunResult res = run_scenario(config, run_options(verb_args[i]));
      std::printf("%s\n", res.run_dir.c_str());
      return 0;
    }
    if (sweep_cmd->parsed()) {
      const ebh::ScenarioConfig base = load_config(sweep_args);
      const ebh::RunResult res =
          run_sweep(base, sweep_pointer, sweep_values, run_options(sweep_args));
      std::printf("%s\n", res.run_dir.c_str());
      return 0;
    }
    if (presets_list->parsed()) {
      for (const auto& name : ebh::preset_names()) std::printf("%s\n", name.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

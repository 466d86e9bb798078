#include "coloc/evaluation.hpp"
#include "coloc/experiments.hpp"
#include "coloc/network.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace coloc;

namespace {

// Options shared by every subcommand that builds a scenario.
struct ScenarioArgs {
  std::string scenario = "n40-sigma01";
  std::map<std::string, std::string> overrides;
  std::vector<std::string> sets;
};

void add_scenario_options(CLI::App* cmd, ScenarioArgs& args) {
  cmd->add_option("--scenario", args.scenario,
                  "named scenario or scenario file (named: " + [] {
                    std::string s;
                    for (const auto& n : scenario_names()) s += (s.empty() ? "" : ", ") + n;
                    return s;
                  }() + ")");
  for (const auto& key : setting_names()) {
    cmd->add_option("--" + key, args.overrides[key], "override scenario key " + key);
  }
  cmd->add_option("--set", args.sets, "extra key=value override (repeatable)");
}

Scenario build_scenario(const ScenarioArgs& args, const CLI::App* cmd) {
  Scenario sc = resolve_scenario(args.scenario);
  for (const auto& key : setting_names()) {
    if (cmd->count("--" + key) > 0) apply_setting(sc, key, args.overrides.at(key));
  }
  for (const auto& kv : args.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("--set expects key=value, got '" + kv + "'");
    apply_setting(sc, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return sc;
}

struct RunArgs {
  ScenarioArgs scenario;
  std::string algorithm = "admm-h";
  int seed_count = 1;
  std::uint64_t first_seed = 1;
  std::vector<std::uint64_t> seed_list;
  std::string out;
  int jobs = 1;
  bool deterministic = false;
  double threshold = 0.0;
};

void add_run_options(CLI::App* cmd, RunArgs& args) {
  add_scenario_options(cmd, args.scenario);
  cmd->add_option("--alg", args.algorithm, "sf-nesterov, admm-sf, admm-nc or admm-h");
  cmd->add_option("--seeds", args.seed_count, "number of seeds, counting from --first-seed")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--first-seed", args.first_seed, "first seed of the range");
  cmd->add_option("--seed-list", args.seed_list, "explicit seeds (overrides --seeds)")
      ->delimiter(',');
  cmd->add_option("--out", args.out, "output directory for CSV files");
  cmd->add_option("--jobs", args.jobs, "seeds solved concurrently")->check(CLI::PositiveNumber);
  cmd->add_flag("--deterministic", args.deterministic, "omit wall-clock timings from traces");
}

ExperimentSpec build_spec(const RunArgs& args, const CLI::App* cmd) {
  ExperimentSpec spec;
  spec.scenario = build_scenario(args.scenario, cmd);
  spec.algorithm = parse_algorithm(args.algorithm);
  if (!args.seed_list.empty()) {
    spec.seeds = args.seed_list;
  } else {
    spec.seeds.clear();
    for (int k = 0; k < args.seed_count; ++k) spec.seeds.push_back(args.first_seed + k);
  }
  spec.jobs = args.jobs;
  spec.deterministic = args.deterministic;
  spec.threshold = args.threshold;
  if (!args.out.empty()) {
    spec.output_dir = args.out;
    fs::create_directories(spec.output_dir);
  }
  spec.validate();
  for (const auto& w : configure(spec.algorithm, spec.scenario.engine).warnings()) {
    std::cerr << "coloc: warning: " << w << '\n';
  }
  return spec;
}

void print_crlb(std::optional<double> crlb) {
  if (crlb) std::cout << "crlb=" << format_number(*crlb) << '\n';
  else std::cout << "crlb=not-localizable\n";
}

std::vector<double> grid_or(const std::vector<double>& grid, double fallback) {
  return grid.empty() ? std::vector<double>{fallback} : grid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed range-based localization by hybrid convex/non-convex ADMM"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run = app.add_subcommand("run", "static benchmark over a set of seeds");
  add_run_options(run, run_args);
  run->add_option("--threshold", run_args.threshold,
                  "RMSE level for iterations_to_threshold (default: 2x CRLB)");

  RunArgs sweep_args;
  std::vector<double> eps_grid, zeta_grid, tau_grid;
  auto* sweep = app.add_subcommand("sweep", "grid over epsilon_c, zeta_c and tau_c");
  add_run_options(sweep, sweep_args);
  sweep->add_option("--epsilon-grid", eps_grid, "epsilon_c values")->delimiter(',');
  sweep->add_option("--zeta-grid", zeta_grid, "zeta_c values")->delimiter(',');
  sweep->add_option("--tau-grid", tau_grid, "tau_c values")->delimiter(',');

  RunArgs track_args;
  track_args.scenario.scenario = "tracking500";
  auto* track = app.add_subcommand("track", "mobile tracking with warm starts");
  add_run_options(track, track_args);

  ScenarioArgs gen_args;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  auto* gen = app.add_subcommand("gen-net", "write a scenario network to a file");
  add_scenario_options(gen, gen_args);
  gen->add_option("--noise-seed", gen_seed, "measurement-noise seed applied to the layout");
  gen->add_option("--out", gen_out, "network file")->required();

  ScenarioArgs crlb_args;
  std::string crlb_file;
  bool crlb_free = false;
  auto* crlb = app.add_subcommand("crlb", "Cramer-Rao bound of a scenario or network file");
  add_scenario_options(crlb, crlb_args);
  crlb->add_option("--network", crlb_file, "network file (instead of the scenario layout)");
  crlb->add_flag("--free-nodes", crlb_free, "normalize by the non-anchor count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const ExperimentSpec spec = build_spec(run_args, run);
      const StaticResult res = run_static(spec);
      print_crlb(res.crlb);
      write_summary_csv(std::cout, {res.summary});
    } else if (*sweep) {
      ExperimentSpec spec = build_spec(sweep_args, sweep);
      const EngineConfig& e = spec.scenario.engine;
      const SweepGrid grid{grid_or(eps_grid, e.epsilon_c), grid_or(zeta_grid, e.zeta_c),
                           grid_or(tau_grid, e.tau_c)};
      write_sweep_csv(std::cout, run_sweep(spec, grid));
    } else if (*track) {
      const ExperimentSpec spec = build_spec(track_args, track);
      write_tracking_csv(std::cout, run_tracking(spec));
    } else if (*gen) {
      const Scenario sc = build_scenario(gen_args, gen);
      const Network net = scenario_network(sc, scenario_layout(sc), gen_seed);
      save_network(net, gen_out);
      std::cout << "wrote " << gen_out << ": " << net.size() << " nodes, " << net.anchor_count()
                << " anchors, " << net.edge_count() << " edges\n";
    } else if (*crlb) {
      const Scenario sc = build_scenario(crlb_args, crlb);
      const Network net = crlb_file.empty() ? scenario_layout(sc) : load_network(crlb_file);
      const auto norm = crlb_free ? CrlbNormalization::kFreeNodes : CrlbNormalization::kAllNodes;
      try {
        std::cout << "crlb=" << format_number(crlb_rmse(net, sc.network.sigma, norm)) << '\n';
      } catch (const NotLocalizable& e) {
        std::cerr << "coloc: " << e.what() << " (deficiency " << e.deficiency() << ")\n";
        return 3;
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "coloc: error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}

#pragma once

#include "coloc/engine.hpp"
#include "coloc/evaluation.hpp"
#include "coloc/network.hpp"
#include "coloc/trace.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace coloc {

enum class Algorithm { kSfNesterov, kAdmmSf, kAdmmNc, kAdmmH };

const char* to_string(Algorithm alg);
/// Throws std::invalid_argument listing the valid names.
Algorithm parse_algorithm(const std::string& name);
std::vector<std::string> algorithm_names();

/// Engine flags for an algorithm, keeping every numeric parameter of `base`.
EngineConfig configure(Algorithm alg, EngineConfig base);

/// Everything needed to reproduce a study: geometry, noise, solver parameters
/// and (for tracking) motion.
struct Scenario {
  std::string name = "custom";
  ScenarioConfig network;  // network.seed fixes the layout
  EngineConfig engine;
  MobilityConfig mobility;
  int steps = 60;          // tracking steps
  // Static runs: each seed redraws the measurement noise on the fixed layout.
  // Off: each seed generates a new layout.
  bool redraw_noise = true;
  std::filesystem::path network_file;  // when set, replaces the generated layout
};

std::vector<std::string> scenario_names();
/// Throws std::invalid_argument listing the known names.
Scenario named_scenario(const std::string& name);

/// Keys accepted by apply_setting, sorted.
std::vector<std::string> setting_names();

/// Sets one field by its config name (e.g. "epsilon_c", "radius").
/// Throws std::invalid_argument on unknown keys or malformed values.
void apply_setting(Scenario& sc, const std::string& key, const std::string& value);

/// key=value lines; '#' starts a comment. An optional `base=<name>` line
/// (first) starts from a named scenario.
Scenario read_scenario(std::istream& in, const std::filesystem::path& origin = {});
Scenario load_scenario(const std::filesystem::path& path);
/// A named scenario, or else a scenario file.
Scenario resolve_scenario(const std::string& name_or_path);

/// Every parameter, in a fixed order, for CSV headers.
std::vector<std::pair<std::string, std::string>> describe(const Scenario& sc);

/// Ground-truth layout of the scenario (file or generated from network.seed).
Network scenario_layout(const Scenario& sc);
/// Network used for one static run: layout plus the seed's measurement noise.
Network scenario_network(const Scenario& sc, const Network& layout, std::uint64_t seed);

struct ExperimentSpec {
  Scenario scenario;
  Algorithm algorithm = Algorithm::kAdmmH;
  std::vector<std::uint64_t> seeds{1};
  std::filesystem::path output_dir;  // empty: nothing written
  int jobs = 1;                      // seeds solved concurrently
  bool deterministic = false;        // no wall-clock columns
  // RMSE level for the summary's iterations_to_threshold; <= 0 means twice
  // the CRLB.
  double threshold = 0.0;
  int iterations() const { return scenario.engine.max_iterations; }
  void validate() const;
};

/// One run of `alg` on `net`. Throws DivergenceError.
RunTrace run_algorithm(const Network& net, Algorithm alg, const EngineConfig& cfg, int iterations,
                       bool timing = true);

struct StaticResult {
  std::vector<RunTrace> traces;  // one per seed, in seed order
  RunTrace mean;
  std::optional<double> crlb;     // empty when the layout is not localizable
  RunSummary summary;
};

/// Runs every seed; with an output directory writes
/// `<alg>_seed<k>.csv`, `<alg>_mean.csv` and `<alg>_summary.csv`.
StaticResult run_static(const ExperimentSpec& spec);

struct SweepGrid {
  std::vector<double> epsilon_c;
  std::vector<double> zeta_c;
  std::vector<double> tau_c;
  [[nodiscard]] std::size_t size() const {
    return epsilon_c.size() * zeta_c.size() * tau_c.size();
  }
};

struct SweepCell {
  double epsilon_c = 0.0;
  double zeta_c = 0.0;
  double tau_c = 0.0;
  int plateau_iteration = -1;
  double final_rmse = 0.0;  // mean over the seeds that did not diverge
  int diverged = 0;         // seeds aborted by the divergence guard
};

inline constexpr const char* kSweepColumns =
    "epsilon_c,zeta_c,tau_c,plateau_iteration,final_rmse,diverged";

/// Seed-averaged static run for every grid cell; writes `<alg>_sweep.csv`.
std::vector<SweepCell> run_sweep(const ExperimentSpec& spec, const SweepGrid& grid);
void write_sweep_csv(std::ostream& out, const std::vector<SweepCell>& cells,
                     const std::vector<std::pair<std::string, std::string>>& metadata = {});

struct TrackingRow {
  int step = 0;
  double rmse = 0.0;
  double crlb = 0.0;  // NaN when that step's network is not localizable
  double nonconvex_frac = 0.0;
  int extended_nodes = 0;
};

inline constexpr const char* kTrackingColumns = "step,rmse,crlb,nonconvex_frac,extended_nodes";

/// Step 0 localizes the initial network from zero; every later step moves
/// the nodes, rebuilds the measurements and runs iterations_per_step rounds
/// warm-started from the previous estimates. Rows are averaged over seeds;
/// each seed drives its own trajectory. Writes `<alg>_tracking.csv`.
std::vector<TrackingRow> run_tracking(const ExperimentSpec& spec);
void write_tracking_csv(std::ostream& out, const std::vector<TrackingRow>& rows,
                        const std::vector<std::pair<std::string, std::string>>& metadata = {});

}  // namespace coloc

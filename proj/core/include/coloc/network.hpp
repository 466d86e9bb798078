#pragma once

#include "coloc/types.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace coloc {

/// Malformed or invariant-violating network data.
class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Ground truth geometry plus the measurement world seen by the nodes.
///
/// Adjacency lists are kept sorted; `ranges[i][k]` is the ranging between i
/// and `neighbors[i][k]`. Each unordered pair carries one measurement, stored
/// in both directions.
struct Network {
  int dim = 2;
  double area_side = 1.0;
  std::vector<Position> positions;
  std::vector<char> anchor_flags;
  std::vector<std::vector<NodeId>> neighbors;
  std::vector<std::vector<double>> ranges;

  // Nodes whose link radius had to be widened to meet a minimum ranging
  // count. Construction metadata; not serialized and not compared.
  int extended_nodes = 0;

  [[nodiscard]] int size() const { return static_cast<int>(positions.size()); }
  [[nodiscard]] bool is_anchor(NodeId i) const { return anchor_flags[i] != 0; }
  [[nodiscard]] std::vector<NodeId> anchors() const;
  [[nodiscard]] int anchor_count() const;
  [[nodiscard]] std::size_t edge_count() const;
  [[nodiscard]] int max_degree() const;

  /// Slot of j inside neighbors[i], or -1.
  [[nodiscard]] int slot_of(NodeId i, NodeId j) const;
  /// Ranging r_ij; throws NetworkError when i and j are not neighbors.
  [[nodiscard]] double range(NodeId i, NodeId j) const;

  /// Throws NetworkError describing the first broken invariant.
  void validate() const;

  friend bool operator==(const Network& a, const Network& b);
};

struct ScenarioConfig {
  int dim = 2;
  int node_count = 40;
  int anchor_count = 10;
  double area_side = 1.0;
  double radius = 0.3;
  // Link radius when either endpoint is an anchor; <= 0 means same as radius.
  double anchor_radius = 0.0;
  // Nodes with fewer rangings get linked to their nearest nodes until they
  // reach this count. Zero disables the extension.
  int min_rangings = 0;
  double sigma = 0.1;
  std::uint64_t seed = 1;

  [[nodiscard]] double effective_anchor_radius() const {
    return anchor_radius > 0.0 ? anchor_radius : radius;
  }
  void validate() const;
};

/// Node motion parameters. Lengths in meters, speeds in km/h, time in seconds.
struct MobilityConfig {
  double area_side = 100.0;
  double mean_speed_kmh = 5.0;
  double speed_std_kmh = 3.33;
  double max_speed_kmh = 15.0;
  double step_period_s = 1.0;
  // Per-step probability that a node draws a fresh heading.
  double heading_change_prob = 0.05;
  int iterations_per_step = 20;
  bool anchors_move = false;

  void validate() const;
};

/// Persistent per-node headings for the random-direction walk.
struct MobilityState {
  std::vector<Vec> headings;
};

/// Uniform placement in the square/cube, the first anchor_count nodes are
/// anchors, links by radius, one Gaussian ranging draw per unordered pair.
/// Throws NetworkError naming the first isolated node.
Network generate_network(const ScenarioConfig& cfg, Rng& rng);

/// Same links, fresh measurement noise.
Network redraw_rangings(const Network& net, double sigma, Rng& rng);

/// Rebuilds links and rangings for the given geometry.
Network build_network(std::vector<Position> positions, std::vector<char> anchor_flags,
                      const ScenarioConfig& links, Rng& rng);

MobilityState init_mobility(const Network& net, Rng& rng);

/// Moves every (non-anchor) node one step and regenerates links and rangings.
Network mobility_step(const Network& net, const ScenarioConfig& links, const MobilityConfig& cfg,
                      MobilityState& state, Rng& rng);

/// Text format, one record per line:
///   dim <n> <N> <|A|>
///   area <side>                 (optional)
///   node <id> <coords...>
///   anchor <id>
///   edge <i> <j> <r_ij>
/// Blank lines and lines starting with '#' are ignored.
Network read_network(std::istream& in);
void write_network(std::ostream& out, const Network& net);
Network load_network(const std::filesystem::path& path);
void save_network(const Network& net, const std::filesystem::path& path);

}  // namespace coloc

#pragma once

#include "coloc/local_solver.hpp"
#include "coloc/network.hpp"
#include "coloc/trace.hpp"
#include "coloc/types.hpp"

#include <limits>
#include <span>
#include <string>
#include <vector>

namespace coloc {

/// Parameters of the distributed solver.
struct EngineConfig {
  double epsilon_c = 0.02;    // penalty while a node uses the convex envelope
  double zeta_c = 0.1;        // initial penalty once a node uses the non-convex cost
  double tau_c = 0.002;       // primal-gap threshold that activates the non-convex cost
  double lambda_max = 1e3;    // multiplier clipping range
  double delta_c = 1.01;      // penalty growth factor
  double theta_c = 0.98;      // required per-round gap contraction
  int max_iterations = 200;
  int newton_iterations = 3;  // per local solve
  bool hybrid = true;         // allow the convex -> non-convex switch
  bool relaxation_only = false;
  // A convex node also switches as soon as one of its neighbors runs the
  // non-convex cost.
  bool spread_switch = true;
  NeighborWeighting weighting = NeighborWeighting::kDerived;
  int threads = 1;
  bool record_timing = true;
  // Divergence guard: any coordinate beyond sanity_factor * area side aborts.
  double sanity_factor = 10.0;

  /// Mode every node starts in: convex unless running the pure non-convex
  /// variant (hybrid off, relaxation off).
  [[nodiscard]] CostMode initial_mode() const {
    return (hybrid || relaxation_only) ? CostMode::Convex : CostMode::NonConvex;
  }
  [[nodiscard]] double base_penalty(CostMode mode) const {
    return mode == CostMode::Convex ? epsilon_c : zeta_c;
  }

  void validate() const;
  /// Non-fatal advice (e.g. zeta_c not much larger than epsilon_c).
  [[nodiscard]] std::vector<std::string> warnings() const;
};

/// Per-node solver state. Slot k of every per-neighbor array refers to
/// neighbors[k].
struct NodeState {
  NodeId id = 0;
  std::optional<Vec> anchor;
  std::vector<NodeId> neighbors;
  std::vector<int> reverse_slot;        // position of `id` in each neighbor's list
  std::vector<double> ranges;
  std::vector<std::optional<Vec>> neighbor_anchor;

  Vec self;                              // x_ii
  std::vector<Vec> replicas;             // x_ij
  std::vector<Vec> z_minus, z_plus;      // splitting variables
  std::vector<Vec> lambda_minus, lambda_plus;

  double penalty = 1.0;
  CostMode mode = CostMode::Convex;
  double prev_gap = std::numeric_limits<double>::infinity();
  bool increase_flag = false;
  bool switched_this_round = false;
  bool switch_armed = false;             // gap has been >= tau_c at least once

  [[nodiscard]] std::size_t degree() const { return neighbors.size(); }
};

/// What node i sends to neighbor j: the z-block stationarity terms plus the
/// sender's penalty and whether it was raised last round.
struct EdgeMessage {
  Vec minus;
  Vec plus;
  double penalty = 0.0;
  bool increase_flag = false;
  bool nonconvex = false;  // sender's cost mode
};

/// Quadratic-penalty targets of the x-update.
struct LocalTargets {
  Vec own;
  std::vector<Vec> neighbors;
};

/// y = (A^T A)^{-1} A^T (z - lambda / c) for one node.
LocalTargets compute_y(const NodeState& node);

LocalProblem make_local_problem(const NodeState& node, const LocalTargets& targets);

/// Replaces x_i by the minimizer of the local augmented Lagrangian.
void x_update(NodeState& node, const EngineConfig& cfg, double sanity_box = 0.0);

EdgeMessage make_message(const NodeState& node, std::size_t slot);

/// z-update of one edge slot from the node's own message and the one received
/// from that neighbor.
void z_update_slot(NodeState& node, std::size_t slot, const EdgeMessage& outgoing,
                   const EdgeMessage& incoming);
void z_update(NodeState& node, std::span<const EdgeMessage> outgoing,
              std::span<const EdgeMessage> incoming);

/// Infinity norm of A_i x_i - z_i.
double primal_gap(const NodeState& node);

void lambda_update(NodeState& node, double lambda_max);

/// One-way switch to the non-convex cost once the gap falls below tau_c, or
/// when a neighbor already switched (spread_switch). Returns true on a switch.
bool hybrid_switch(NodeState& node, double gap, bool neighbor_nonconvex, const EngineConfig& cfg);

/// Penalty growth for non-convex nodes; no-op for convex ones and on the
/// round a node switched.
void penalty_update(NodeState& node, double gap, bool neighbor_increased,
                    const EngineConfig& cfg);

/// Previous-step solution used to seed a new run.
struct WarmStart {
  std::vector<Vec> estimates;
  std::vector<CostMode> modes;  // empty: use the configured initial mode
  // Optional full node states of the previous run (same node ids). Links that
  // still exist keep their splitting variables and multipliers and every node
  // keeps its mode; new links start consistent with zero multipliers.
  // Penalties restart from the mode's base value.
  std::vector<NodeState> states;
};

/// Synchronous ADMM over a whole network.
class Engine {
 public:
  Engine(Network net, EngineConfig cfg);
  Engine(Network net, EngineConfig cfg, const WarmStart& warm);

  /// One synchronous round: y, x, message exchange, z, lambda, mode switch,
  /// penalty update. Throws DivergenceError if an iterate leaves the sanity box.
  TraceRow iterate();

  /// `iterations` rounds; rows are appended to the returned trace.
  RunTrace run(int iterations);

  [[nodiscard]] const Network& network() const { return net_; }
  [[nodiscard]] const EngineConfig& config() const { return cfg_; }
  [[nodiscard]] const std::vector<NodeState>& nodes() const { return nodes_; }
  /// Estimates, modes and full node states for seeding the next run.
  [[nodiscard]] WarmStart warm_start() const;
  [[nodiscard]] int iteration() const { return iteration_; }
  [[nodiscard]] std::int64_t messages_per_round() const {
    return 2 * static_cast<std::int64_t>(net_.edge_count());
  }
  [[nodiscard]] std::vector<Vec> estimates() const;
  [[nodiscard]] std::vector<CostMode> modes() const;
  [[nodiscard]] double nonconvex_fraction() const;

 private:
  void init_nodes(const WarmStart* warm);

  Network net_;
  EngineConfig cfg_;
  std::vector<NodeState> nodes_;
  std::vector<std::vector<EdgeMessage>> outbox_;
  int iteration_ = 0;
  double elapsed_ms_ = 0.0;
};

}  // namespace coloc

#include "coloc/engine.hpp"

#include "coloc/evaluation.hpp"
#include "coloc/parallel.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace coloc {

void EngineConfig::validate() const {
  if (!(epsilon_c > 0.0) || !(zeta_c > 0.0)) {
    throw std::invalid_argument("epsilon_c and zeta_c must be positive");
  }
  if (!(tau_c >= 0.0)) throw std::invalid_argument("tau_c must be non-negative");
  if (!(lambda_max > 0.0)) throw std::invalid_argument("lambda_max must be positive");
  if (!(delta_c > 1.0)) throw std::invalid_argument("delta_c must exceed 1");
  if (!(theta_c > 0.0 && theta_c < 1.0)) throw std::invalid_argument("theta_c must lie in (0, 1)");
  if (max_iterations < 0) throw std::invalid_argument("max_iterations must be non-negative");
  if (newton_iterations < 1) throw std::invalid_argument("newton_iterations must be >= 1");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
  if (hybrid && relaxation_only) {
    throw std::invalid_argument("hybrid and relaxation_only are mutually exclusive");
  }
}

std::vector<std::string> EngineConfig::warnings() const {
  std::vector<std::string> out;
  if ((hybrid || !relaxation_only) && zeta_c < 2.0 * epsilon_c) {
    out.emplace_back("zeta_c should be much larger than epsilon_c");
  }
  return out;
}

LocalTargets compute_y(const NodeState& node) {
  const std::size_t deg = node.degree();
  const double inv_c = 1.0 / node.penalty;
  LocalTargets y;
  y.own = Vec::Zero(node.self.size());
  y.neighbors.resize(deg);
  for (std::size_t k = 0; k < deg; ++k) {
    const Vec wm = node.z_minus[k] - node.lambda_minus[k] * inv_c;
    const Vec wp = node.z_plus[k] - node.lambda_plus[k] * inv_c;
    y.own += wm + wp;
    y.neighbors[k] = 0.5 * (wp - wm);
  }
  if (deg > 0) y.own /= 2.0 * static_cast<double>(deg);
  return y;
}

LocalProblem make_local_problem(const NodeState& node, const LocalTargets& targets) {
  LocalProblem p;
  p.anchor = node.anchor;
  p.own_target = targets.own;
  p.penalty = node.penalty;
  p.mode = node.mode;
  p.neighbors.resize(node.degree());
  for (std::size_t k = 0; k < node.degree(); ++k) {
    p.neighbors[k].target = targets.neighbors[k];
    p.neighbors[k].range = node.ranges[k];
    p.neighbors[k].anchor = node.neighbor_anchor[k];
  }
  return p;
}

void x_update(NodeState& node, const EngineConfig& cfg, double sanity_box) {
  const LocalProblem p = make_local_problem(node, compute_y(node));
  ReducedSolveOptions opts;
  opts.max_newton_iterations = cfg.newton_iterations;
  opts.weighting = cfg.weighting;
  opts.sanity_box = sanity_box;
  LocalSolution sol = solve_local(p, opts);
  node.self = std::move(sol.self);
  node.replicas = std::move(sol.replicas);
}

EdgeMessage make_message(const NodeState& node, std::size_t slot) {
  const double c = node.penalty;
  EdgeMessage m;
  m.minus = node.lambda_minus[slot] + c * (node.self - node.replicas[slot]);
  m.plus = node.lambda_plus[slot] + c * (node.self + node.replicas[slot]);
  m.penalty = c;
  m.increase_flag = node.increase_flag;
  m.nonconvex = node.mode == CostMode::NonConvex;
  return m;
}

void z_update_slot(NodeState& node, std::size_t slot, const EdgeMessage& outgoing,
                   const EdgeMessage& incoming) {
  // c_i + c_j and a - b = -(b - a) are exact in IEEE arithmetic, so both ends
  // of an edge obtain exactly antisymmetric z- and symmetric z+.
  const double denom = outgoing.penalty + incoming.penalty;
  node.z_minus[slot] = (outgoing.minus - incoming.minus) / denom;
  node.z_plus[slot] = (outgoing.plus + incoming.plus) / denom;
}

void z_update(NodeState& node, std::span<const EdgeMessage> outgoing,
              std::span<const EdgeMessage> incoming) {
  if (outgoing.size() != node.degree() || incoming.size() != node.degree()) {
    throw std::logic_error("z_update: missing neighbor message for node " +
                           std::to_string(node.id));
  }
  for (std::size_t k = 0; k < node.degree(); ++k) {
    z_update_slot(node, k, outgoing[k], incoming[k]);
  }
}

double primal_gap(const NodeState& node) {
  double gap = 0.0;
  for (std::size_t k = 0; k < node.degree(); ++k) {
    const Vec rm = node.self - node.replicas[k] - node.z_minus[k];
    const Vec rp = node.self + node.replicas[k] - node.z_plus[k];
    gap = std::max({gap, rm.lpNorm<Eigen::Infinity>(), rp.lpNorm<Eigen::Infinity>()});
  }
  return gap;
}

void lambda_update(NodeState& node, double lambda_max) {
  const double c = node.penalty;
  for (std::size_t k = 0; k < node.degree(); ++k) {
    const Vec rm = node.self - node.replicas[k] - node.z_minus[k];
    const Vec rp = node.self + node.replicas[k] - node.z_plus[k];
    node.lambda_minus[k] = (node.lambda_minus[k] + c * rm).cwiseMax(-lambda_max).cwiseMin(lambda_max);
    node.lambda_plus[k] = (node.lambda_plus[k] + c * rp).cwiseMax(-lambda_max).cwiseMin(lambda_max);
  }
}

bool hybrid_switch(NodeState& node, double gap, bool neighbor_nonconvex, const EngineConfig& cfg) {
  node.switched_this_round = false;
  if (!cfg.hybrid || node.mode != CostMode::Convex) return false;
  // A node whose gap has never reached tau_c has not started converging yet
  // (e.g. zero gap because no anchor information has arrived), so only a
  // crossing from above counts. tau_c = inf switches unconditionally.
  const bool armed = node.switch_armed || std::isinf(cfg.tau_c);
  if (gap >= cfg.tau_c) node.switch_armed = true;
  const bool own = armed && gap < cfg.tau_c;
  if (!own && !(cfg.spread_switch && neighbor_nonconvex)) return false;
  node.mode = CostMode::NonConvex;
  node.penalty = cfg.zeta_c;
  node.prev_gap = std::numeric_limits<double>::infinity();
  node.increase_flag = false;
  node.switched_this_round = true;
  return true;
}

void penalty_update(NodeState& node, double gap, bool neighbor_increased,
                    const EngineConfig& cfg) {
  if (node.mode != CostMode::NonConvex) return;
  if (node.switched_this_round) return;
  if (gap > cfg.theta_c * node.prev_gap || neighbor_increased) {
    node.penalty *= cfg.delta_c;
    node.increase_flag = true;
  } else {
    node.increase_flag = false;
  }
  node.prev_gap = gap;
}

// ---------------------------------------------------------------------------

Engine::Engine(Network net, EngineConfig cfg) : net_(std::move(net)), cfg_(cfg) {
  cfg_.validate();
  net_.validate();
  init_nodes(nullptr);
}

Engine::Engine(Network net, EngineConfig cfg, const WarmStart& warm)
    : net_(std::move(net)), cfg_(cfg) {
  cfg_.validate();
  net_.validate();
  if (static_cast<int>(warm.estimates.size()) != net_.size() ||
      (!warm.modes.empty() && static_cast<int>(warm.modes.size()) != net_.size()) ||
      (!warm.states.empty() && static_cast<int>(warm.states.size()) != net_.size())) {
    throw std::invalid_argument("warm start does not match the network size");
  }
  init_nodes(&warm);
}

void Engine::init_nodes(const WarmStart* warm) {
  const int n = net_.size();
  const int dim = net_.dim;
  nodes_.assign(n, NodeState{});
  outbox_.assign(n, {});
  const Vec zero = Vec::Zero(dim);

  auto start_point = [&](NodeId j) -> Vec {
    if (net_.is_anchor(j)) return net_.positions[j];
    return warm ? warm->estimates[j] : zero;
  };

  for (NodeId i = 0; i < n; ++i) {
    NodeState& s = nodes_[i];
    s.id = i;
    if (net_.is_anchor(i)) s.anchor = net_.positions[i];
    s.neighbors = net_.neighbors[i];
    s.ranges = net_.ranges[i];
    const std::size_t deg = s.neighbors.size();
    s.reverse_slot.resize(deg);
    s.neighbor_anchor.resize(deg);
    for (std::size_t k = 0; k < deg; ++k) {
      const NodeId j = s.neighbors[k];
      s.reverse_slot[k] = net_.slot_of(j, i);
      if (net_.is_anchor(j)) s.neighbor_anchor[k] = net_.positions[j];
    }

    s.self = start_point(i);
    s.replicas.resize(deg);
    s.z_minus.assign(deg, zero);
    s.z_plus.assign(deg, zero);
    s.lambda_minus.assign(deg, zero);
    s.lambda_plus.assign(deg, zero);
    for (std::size_t k = 0; k < deg; ++k) {
      s.replicas[k] = start_point(s.neighbors[k]);
      if (warm) {
        s.z_minus[k] = s.self - s.replicas[k];
        s.z_plus[k] = s.self + s.replicas[k];
      }
    }

    s.mode = (warm && !warm->modes.empty()) ? warm->modes[i] : cfg_.initial_mode();
    s.penalty = cfg_.base_penalty(s.mode);
    s.prev_gap = std::numeric_limits<double>::infinity();
    s.increase_flag = false;
    if (warm && !warm->states.empty()) {
      const NodeState& old = warm->states[i];
      s.mode = old.mode;
      s.penalty = cfg_.base_penalty(s.mode);
      s.switch_armed = old.switch_armed;
      for (std::size_t k = 0; k < deg; ++k) {
        const auto it = std::lower_bound(old.neighbors.begin(), old.neighbors.end(), s.neighbors[k]);
        if (it == old.neighbors.end() || *it != s.neighbors[k]) continue;
        const auto o = static_cast<std::size_t>(it - old.neighbors.begin());
        s.z_minus[k] = old.z_minus[o];
        s.z_plus[k] = old.z_plus[o];
        s.lambda_minus[k] = old.lambda_minus[o];
        s.lambda_plus[k] = old.lambda_plus[o];
      }
    }
    outbox_[i].resize(deg);
  }
}

TraceRow Engine::iterate() {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = nodes_.size();
  const double box = cfg_.sanity_factor * net_.area_side;

  parallel_for(n, cfg_.threads, [&](std::size_t i) { x_update(nodes_[i], cfg_, box); });

  parallel_for(n, cfg_.threads, [&](std::size_t i) {
    for (std::size_t k = 0; k < nodes_[i].degree(); ++k) outbox_[i][k] = make_message(nodes_[i], k);
  });

  std::vector<double> gaps(n, 0.0);
  parallel_for(n, cfg_.threads, [&](std::size_t i) {
    NodeState& s = nodes_[i];
    bool neighbor_increased = false;
    bool neighbor_nonconvex = false;
    for (std::size_t k = 0; k < s.degree(); ++k) {
      const EdgeMessage& in = outbox_[s.neighbors[k]][s.reverse_slot[k]];
      z_update_slot(s, k, outbox_[i][k], in);
      neighbor_increased = neighbor_increased || in.increase_flag;
      neighbor_nonconvex = neighbor_nonconvex || in.nonconvex;
    }
    const double gap = primal_gap(s);
    gaps[i] = gap;
    lambda_update(s, cfg_.lambda_max);
    hybrid_switch(s, gap, neighbor_nonconvex, cfg_);
    penalty_update(s, gap, neighbor_increased, cfg_);
  });

  ++iteration_;
  for (const NodeState& s : nodes_) {
    if (!s.self.allFinite() || s.self.cwiseAbs().maxCoeff() > box) {
      throw DivergenceError("iteration " + std::to_string(iteration_) + ": node " +
                            std::to_string(s.id) + " left the sanity box");
    }
  }

  TraceRow row;
  row.iter = iteration_;
  row.rmse = rmse(estimates(), net_.positions);
  double sum = 0.0;
  for (double g : gaps) {
    row.max_gap = std::max(row.max_gap, g);
    sum += g;
  }
  row.mean_gap = n > 0 ? sum / static_cast<double>(n) : 0.0;
  row.nonconvex_frac = nonconvex_fraction();
  row.messages = messages_per_round();
  if (cfg_.record_timing) {
    elapsed_ms_ += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                       .count();
    row.elapsed_ms = elapsed_ms_;
  }
  return row;
}

RunTrace Engine::run(int iterations) {
  RunTrace trace;
  trace.rows.reserve(std::max(0, iterations));
  for (int t = 0; t < iterations; ++t) trace.rows.push_back(iterate());
  trace.final_estimates = estimates();
  return trace;
}

std::vector<Vec> Engine::estimates() const {
  std::vector<Vec> out;
  out.reserve(nodes_.size());
  for (const auto& s : nodes_) out.push_back(s.self);
  return out;
}

WarmStart Engine::warm_start() const {
  WarmStart w;
  w.estimates = estimates();
  w.modes = modes();
  w.states = nodes_;
  return w;
}

std::vector<CostMode> Engine::modes() const {
  std::vector<CostMode> out;
  out.reserve(nodes_.size());
  for (const auto& s : nodes_) out.push_back(s.mode);
  return out;
}

double Engine::nonconvex_fraction() const {
  if (nodes_.empty()) return 0.0;
  const auto count = std::count_if(nodes_.begin(), nodes_.end(),
                                   [](const NodeState& s) { return s.mode == CostMode::NonConvex; });
  return static_cast<double>(count) / static_cast<double>(nodes_.size());
}

}  // namespace coloc

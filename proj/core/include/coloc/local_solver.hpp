#pragma once

#include "coloc/types.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace coloc {

/// How neighbor terms are weighted in the reduced own-position problem.
///
/// Minimizing the local augmented Lagrangian over a free neighbor replica
/// leaves c/(1+2c) * ([d - r]•)^2, while a pinned anchor neighbor keeps its
/// full (1/2)([d - r]•)^2. After dividing through by 2cN this gives the
/// weights 1/((1+2c)N) and 1/(2cN) respectively (kDerived). kSwapped assigns
/// the two the other way round and is kept for comparison only.
enum class NeighborWeighting { kDerived, kSwapped };

struct NeighborTarget {
  Vec target;                      // y_ij
  double range = 0.0;              // r_ij
  std::optional<Vec> anchor;       // a_j when the neighbor is an anchor
};

/// One node's x-update: minimize over the replica vector
///   F•_i(x_i) + c N ||x_ii - y_ii||^2 + c sum_j ||x_ij - y_ij||^2
/// with anchor positions pinned.
struct LocalProblem {
  std::optional<Vec> anchor;       // a_i when this node is an anchor
  Vec own_target;                  // y_ii
  std::vector<NeighborTarget> neighbors;
  double penalty = 1.0;            // c_i
  CostMode mode = CostMode::Convex;

  [[nodiscard]] int dim() const { return static_cast<int>(own_target.size()); }
  void validate() const;
};

struct LocalSolution {
  Vec self;
  std::vector<Vec> replicas;
  int newton_iterations = 0;
  // A coincident point was met and the fixed-direction fallback was used.
  bool degenerate = false;
};

/// argmin_x (1/2)(||x - a|| - r)^2 + c ||x - y||^2 in closed form (or its
/// convex-envelope counterpart). `degenerate` is set when y == a.
Vec anchor_replica_update(const Vec& anchor, const Vec& target, double range, double penalty,
                          CostMode mode, bool* degenerate = nullptr);

/// Minimizing neighbor replica for a fixed own position.
Vec replica_recovery(const Vec& self, const Vec& target, double range, double penalty,
                     CostMode mode, bool* degenerate = nullptr);

/// Full local objective evaluated at (self, replicas). Pinned entries are
/// taken as given, so callers should pass a_i / a_j there.
double local_objective(const LocalProblem& p, const Vec& self, const std::vector<Vec>& replicas);

/// The reduced order-n objective in the own position only.
double reduced_objective(const LocalProblem& p, const Vec& x,
                         NeighborWeighting weighting = NeighborWeighting::kDerived);

struct ReducedSolveOptions {
  int max_newton_iterations = 3;
  double gradient_tolerance = 1e-12;
  NeighborWeighting weighting = NeighborWeighting::kDerived;
  // Iterates are clamped to [-box, box]; <= 0 disables.
  double sanity_box = 0.0;
  // Also start Newton from the two points of every neighbor circle aligned
  // with y_ii and keep the best. The non-convex reduced objective can have
  // several basins when the penalty is small.
  bool multi_start = false;
};

/// Anchors: closed form per neighbor. Others: damped Newton on the reduced
/// problem from y_ii, then replicas by replica_recovery.
LocalSolution solve_local(const LocalProblem& p, const ReducedSolveOptions& opts = {});

/// Reduced Newton solve for a non-anchor node.
LocalSolution reduced_solve(const LocalProblem& p, const ReducedSolveOptions& opts = {});

struct OracleOptions {
  int starts = 8;
  int max_iterations = 2000;
  double gradient_tolerance = 1e-11;
  std::uint64_t seed = 7;
};

struct OracleSolution {
  Vec self;
  std::vector<Vec> replicas;
  double objective = 0.0;
};

/// Multi-start BFGS (with a Newton polish) over the full order n(1+N_i)
/// replica vector. Test-grade: slow, but independent of the reduction.
OracleSolution full_oracle_solve(const LocalProblem& p, const OracleOptions& opts = {});

}  // namespace coloc

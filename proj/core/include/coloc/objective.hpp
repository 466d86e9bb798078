#pragma once

#include "coloc/types.hpp"

#include <Eigen/Core>

#include <span>

namespace coloc {

/// Unit step with the right-continuous convention 1(0) = 1.
inline double unit_step(double x) { return x >= 0.0 ? 1.0 : 0.0; }

/// g(x) = x^2/2 for x >= 0, zero otherwise.
inline double step_quadratic(double x) { return x >= 0.0 ? 0.5 * x * x : 0.0; }
inline double step_quadratic_d1(double x) { return x >= 0.0 ? x : 0.0; }
inline double step_quadratic_d2(double x) { return unit_step(x); }

/// The mode-dependent step 1•(x): constant one for the non-convex cost.
inline double active_step(double x, CostMode mode) {
  return mode == CostMode::NonConvex ? 1.0 : unit_step(x);
}

/// The mode-dependent positive part [x]• = x * 1•(x).
inline double active_part(double x, CostMode mode) { return x * active_step(x, mode); }

/// Ranging mismatch cost of a single difference vector.
///   NonConvex: (|z| - r)^2 / 2
///   Convex:    g(|z| - r), the convex envelope of the above.
double pair_cost(const Vec& z, double range, CostMode mode);

/// Gradient A(z, r) of pair_cost with respect to z. Zero at z = 0.
Vec pair_gradient(const Vec& z, double range, CostMode mode);

/// Hessian B(z, r) of pair_cost with respect to z. Zero at z = 0.
Mat pair_hessian(const Vec& z, double range, CostMode mode);

/// Local cost of node i evaluated on its replica vector: sum over neighbors of
/// pair_cost(self - replica_j, r_ij).
double node_cost(const Vec& self, std::span<const Vec> replicas, std::span<const double> ranges,
                 CostMode mode);

struct NodeGradHess {
  // Laid out as [x_ii, x_i1, ..., x_iN], each block of the coordinate dimension.
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
  // Set when some replica coincides with the own position and the zero
  // subgradient was substituted.
  bool degenerate = false;
};

NodeGradHess node_grad_hess(const Vec& self, std::span<const Vec> replicas,
                            std::span<const double> ranges, CostMode mode);

}  // namespace coloc

#pragma once

#include <Eigen/Core>

#include <random>
#include <stdexcept>
#include <string>

namespace coloc {

// Coordinates live in 2D or 3D; the fixed upper bound keeps them off the heap.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;

using Position = Vec;

using NodeId = int;

using Rng = std::mt19937_64;

/// Selects which per-edge cost a node is currently using.
enum class CostMode { Convex, NonConvex };

inline const char* to_string(CostMode mode) {
  return mode == CostMode::Convex ? "convex" : "nonconvex";
}

/// Raised when an iterate leaves the sanity box around the deployment area.
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace coloc

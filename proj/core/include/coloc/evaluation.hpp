#pragma once

#include "coloc/network.hpp"
#include "coloc/trace.hpp"
#include "coloc/types.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace coloc {

/// sqrt(1/N sum_i ||x_i - p_i||^2) over all nodes. Throws
/// std::invalid_argument on mismatched sizes or dimensions.
double rmse(const std::vector<Vec>& estimates, const std::vector<Position>& truth);

/// The Fisher information on the free (non-anchor) coordinates is singular.
class NotLocalizable : public std::runtime_error {
 public:
  NotLocalizable(const std::string& what, int deficiency)
      : std::runtime_error(what), deficiency_(deficiency) {}
  /// Dimension of the unobservable subspace.
  [[nodiscard]] int deficiency() const { return deficiency_; }

 private:
  int deficiency_;
};

enum class CrlbNormalization {
  kAllNodes,   // divide by N, matching rmse() with zero-error anchors
  kFreeNodes,  // divide by the number of non-anchor nodes
};

/// Cramer-Rao bound on RMSE for Gaussian ranging with std sigma, anchors
/// exactly known, one measurement per edge.
double crlb_rmse(const Network& net, double sigma,
                 CrlbNormalization norm = CrlbNormalization::kAllNodes);

/// Centralized relaxed cost sum_i sum_{j in N_i} g(||p_i - p_j|| - r_ij),
/// each edge counted from both ends.
double relaxed_cost(const Network& net, const std::vector<Vec>& positions);
std::vector<Vec> relaxed_gradient(const Network& net, const std::vector<Vec>& positions);

struct NesterovOptions {
  // Start from L = 2 * max_degree and double L whenever the sufficient-decrease
  // test fails. Off: fixed step 1 / (4 * max_degree), a guaranteed bound.
  bool backtracking = true;
  bool record_timing = true;
};

/// Accelerated gradient on the relaxed cost with anchors held fixed, from the
/// all-zero start. One row per gradient step.
RunTrace nesterov_sf(const Network& net, int steps, const NesterovOptions& opts = {});

/// First iteration whose rmse is <= level, or -1.
int iterations_to_level(const RunTrace& trace, double level);

/// First iteration after which rmse stays within rel_tol of the final value, or
/// -1 for an empty trace.
int plateau_iteration(const RunTrace& trace, double rel_tol = 0.05);

struct RunSummary {
  std::string name;
  int iterations = 0;
  int iterations_to_threshold = -1;
  int plateau_iteration = -1;
  double final_rmse = 0.0;
  std::int64_t total_messages = 0;
  double crlb = 0.0;
  double crlb_ratio = 0.0;   // final_rmse / crlb
};

struct NamedTrace {
  std::string name;
  RunTrace trace;
};

std::vector<RunSummary> compare_runs(const std::vector<NamedTrace>& traces, double threshold,
                                     double crlb);

inline constexpr const char* kSummaryColumns =
    "name,iterations,iterations_to_threshold,plateau_iteration,final_rmse,total_messages,crlb,"
    "crlb_ratio";

void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& rows);

}  // namespace coloc

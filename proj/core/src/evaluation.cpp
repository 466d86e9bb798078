#include "coloc/evaluation.hpp"

#include "coloc/objective.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <ostream>

namespace coloc {

double rmse(const std::vector<Vec>& estimates, const std::vector<Position>& truth) {
  if (estimates.size() != truth.size()) {
    throw std::invalid_argument("rmse: estimate and truth node sets differ");
  }
  if (truth.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (estimates[i].size() != truth[i].size()) {
      throw std::invalid_argument("rmse: dimension mismatch at node " + std::to_string(i));
    }
    sum += (estimates[i] - truth[i]).squaredNorm();
  }
  return std::sqrt(sum / static_cast<double>(truth.size()));
}

double crlb_rmse(const Network& net, double sigma, CrlbNormalization norm) {
  if (!(sigma >= 0.0)) throw std::invalid_argument("crlb_rmse: sigma must be non-negative");
  const int n = net.size();
  const int dim = net.dim;
  std::vector<int> index(n, -1);
  int free_count = 0;
  for (NodeId i = 0; i < n; ++i) {
    if (!net.is_anchor(i)) index[i] = free_count++;
  }
  if (free_count == 0) return 0.0;

  // Information matrix for unit noise; the bound scales linearly in sigma.
  const int size = free_count * dim;
  Eigen::MatrixXd fim = Eigen::MatrixXd::Zero(size, size);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j : net.neighbors[i]) {
      if (j < i) continue;
      const Vec diff = net.positions[i] - net.positions[j];
      const double d = diff.norm();
      if (d == 0.0) continue;
      const Vec u = diff / d;
      const Mat outer = u * u.transpose();
      const int a = index[i];
      const int b = index[j];
      if (a >= 0) fim.block(a * dim, a * dim, dim, dim) += outer;
      if (b >= 0) fim.block(b * dim, b * dim, dim, dim) += outer;
      if (a >= 0 && b >= 0) {
        fim.block(a * dim, b * dim, dim, dim) -= outer;
        fim.block(b * dim, a * dim, dim, dim) -= outer;
      }
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt(fim);
  bool singular = llt.info() != Eigen::Success;
  double trace_inv = 0.0;
  if (!singular) {
    Eigen::MatrixXd inv_l = Eigen::MatrixXd::Identity(size, size);
    llt.matrixL().solveInPlace(inv_l);
    trace_inv = inv_l.squaredNorm();
    singular = !std::isfinite(trace_inv) || trace_inv > 1e12 * size;
  }
  if (singular) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(fim, Eigen::EigenvaluesOnly);
    const auto& values = eig.eigenvalues();
    const double top = std::max(values.maxCoeff(), 1e-300);
    int deficiency = 0;
    for (Eigen::Index k = 0; k < values.size(); ++k) {
      if (values[k] <= 1e-10 * top) ++deficiency;
    }
    throw NotLocalizable("network is not localizable: Fisher information has a " +
                             std::to_string(deficiency) + "-dimensional null space",
                         std::max(deficiency, 1));
  }
  const double denom = norm == CrlbNormalization::kAllNodes ? n : free_count;
  return sigma * std::sqrt(trace_inv / denom);
}

double relaxed_cost(const Network& net, const std::vector<Vec>& positions) {
  double total = 0.0;
  for (NodeId i = 0; i < net.size(); ++i) {
    for (std::size_t k = 0; k < net.neighbors[i].size(); ++k) {
      total += pair_cost(positions[i] - positions[net.neighbors[i][k]], net.ranges[i][k],
                         CostMode::Convex);
    }
  }
  return total;
}

std::vector<Vec> relaxed_gradient(const Network& net, const std::vector<Vec>& positions) {
  std::vector<Vec> grad(net.size(), Vec::Zero(net.dim));
  for (NodeId i = 0; i < net.size(); ++i) {
    for (std::size_t k = 0; k < net.neighbors[i].size(); ++k) {
      // Both directed terms of the edge contribute equally to node i.
      grad[i] += 2.0 * pair_gradient(positions[i] - positions[net.neighbors[i][k]],
                                     net.ranges[i][k], CostMode::Convex);
    }
  }
  return grad;
}

RunTrace nesterov_sf(const Network& net, int steps, const NesterovOptions& opts) {
  net.validate();
  const int n = net.size();
  const auto start = std::chrono::steady_clock::now();
  const std::int64_t messages = 2 * static_cast<std::int64_t>(net.edge_count());

  std::vector<Vec> x(n, Vec::Zero(net.dim));
  for (NodeId i : net.anchors()) x[i] = net.positions[i];
  std::vector<Vec> x_prev = x;
  std::vector<Vec> y = x;
  double t = 1.0;
  // 4 * max_degree bounds the curvature of the doubly counted cost; with
  // backtracking start from half of it and let the test double it when needed.
  const double bound = 4.0 * std::max(1, net.max_degree());
  double lipschitz = opts.backtracking ? 0.5 * bound : bound;

  auto take_step = [&](const std::vector<Vec>& from, const std::vector<Vec>& grad, double L) {
    std::vector<Vec> out = from;
    for (NodeId i = 0; i < n; ++i) {
      if (!net.is_anchor(i)) out[i] -= grad[i] / L;
    }
    return out;
  };

  RunTrace trace;
  trace.rows.reserve(std::max(0, steps));
  for (int k = 1; k <= steps; ++k) {
    const std::vector<Vec> grad = relaxed_gradient(net, y);
    std::vector<Vec> next = take_step(y, grad, lipschitz);
    if (opts.backtracking) {
      const double fy = relaxed_cost(net, y);
      for (int guard = 0; guard < 60; ++guard) {
        double lin = 0.0;
        double sq = 0.0;
        for (NodeId i = 0; i < n; ++i) {
          const Vec d = next[i] - y[i];
          lin += grad[i].dot(d);
          sq += d.squaredNorm();
        }
        if (relaxed_cost(net, next) <= fy + lin + 0.5 * lipschitz * sq + 1e-15 * std::abs(fy)) {
          break;
        }
        lipschitz *= 2.0;
        next = take_step(y, grad, lipschitz);
      }
    }
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double momentum = (t - 1.0) / t_next;
    for (NodeId i = 0; i < n; ++i) y[i] = next[i] + momentum * (next[i] - x[i]);
    x_prev = std::move(x);
    x = std::move(next);
    t = t_next;

    TraceRow row;
    row.iter = k;
    row.rmse = rmse(x, net.positions);
    row.messages = messages;
    if (opts.record_timing) {
      row.elapsed_ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
              .count();
    }
    trace.rows.push_back(row);
  }
  trace.final_estimates = x;
  trace.set("algorithm", "sf-nesterov");
  trace.set("lipschitz", lipschitz);
  return trace;
}

int iterations_to_level(const RunTrace& trace, double level) {
  for (const auto& r : trace.rows) {
    if (r.rmse <= level) return r.iter;
  }
  return -1;
}

int plateau_iteration(const RunTrace& trace, double rel_tol) {
  if (trace.rows.empty()) return -1;
  const double final_value = trace.rows.back().rmse;
  const double band = rel_tol * final_value;
  int first = trace.rows.back().iter;
  for (auto it = trace.rows.rbegin(); it != trace.rows.rend(); ++it) {
    if (std::abs(it->rmse - final_value) > band) break;
    first = it->iter;
  }
  return first;
}

std::vector<RunSummary> compare_runs(const std::vector<NamedTrace>& traces, double threshold,
                                     double crlb) {
  std::vector<RunSummary> out;
  out.reserve(traces.size());
  for (const auto& [name, trace] : traces) {
    RunSummary s;
    s.name = name;
    s.iterations = trace.rows.empty() ? 0 : trace.rows.back().iter;
    s.iterations_to_threshold = iterations_to_level(trace, threshold);
    s.plateau_iteration = plateau_iteration(trace);
    s.final_rmse = trace.rows.empty() ? std::nan("") : trace.rows.back().rmse;
    s.total_messages = trace.total_messages();
    s.crlb = crlb;
    s.crlb_ratio = crlb > 0.0 ? s.final_rmse / crlb : std::nan("");
    out.push_back(std::move(s));
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& rows) {
  out << kSummaryColumns << '\n';
  for (const auto& s : rows) {
    out << s.name << ',' << s.iterations << ',' << s.iterations_to_threshold << ','
        << s.plateau_iteration << ',' << format_number(s.final_rmse) << ',' << s.total_messages
        << ',' << format_number(s.crlb) << ',' << format_number(s.crlb_ratio) << '\n';
  }
}

}  // namespace coloc

#include "coloc/local_solver.hpp"

#include "coloc/objective.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

namespace coloc {

namespace {

constexpr double kArmijoSlope = 1e-4;
constexpr int kMaxHalvings = 60;
constexpr double kCoincidence = 1e-12;
constexpr double kPerturbation = 1e-9;

bool all_finite(const Vec& v) { return v.allFinite(); }

double neighbor_weight(const LocalProblem& p, const NeighborTarget& nb,
                       NeighborWeighting weighting) {
  const double n = static_cast<double>(p.neighbors.size());
  const double c = p.penalty;
  const bool pinned = nb.anchor.has_value();
  const bool use_two_c = (weighting == NeighborWeighting::kDerived) == pinned;
  return 1.0 / ((use_two_c ? 2.0 * c : 1.0 + 2.0 * c) * n);
}

const Vec& reduced_anchor_point(const NeighborTarget& nb) {
  return nb.anchor ? *nb.anchor : nb.target;
}

struct ReducedModel {
  double value = 0.0;
  Vec gradient;
  Mat hessian;
};

ReducedModel reduced_model(const LocalProblem& p, const Vec& x, NeighborWeighting weighting) {
  const int n = p.dim();
  ReducedModel m;
  const Vec dx = x - p.own_target;
  m.value = 0.5 * dx.squaredNorm();
  m.gradient = dx;
  m.hessian = Mat::Identity(n, n);
  for (const auto& nb : p.neighbors) {
    const double w = neighbor_weight(p, nb, weighting);
    const Vec q = x - reduced_anchor_point(nb);
    const double norm = q.norm();
    const double part = active_part(norm - nb.range, p.mode);
    m.value += 0.5 * w * part * part;
    if (norm < kCoincidence) continue;
    m.gradient += q * (w * part / norm);
    m.hessian.diagonal().array() += w * part / norm;
    m.hessian.noalias() +=
        q * q.transpose() * (w * nb.range * active_step(norm - nb.range, p.mode) /
                             (norm * norm * norm));
  }
  return m;
}

void clamp_to_box(Vec& x, double box) {
  if (box > 0.0) x = x.cwiseMax(-box).cwiseMin(box);
}

// --- full-order oracle helpers -------------------------------------------

struct FullLayout {
  bool self_free = true;
  std::vector<int> free_neighbors;   // indices into p.neighbors
};

FullLayout full_layout(const LocalProblem& p) {
  FullLayout layout;
  layout.self_free = !p.anchor.has_value();
  for (std::size_t j = 0; j < p.neighbors.size(); ++j) {
    if (!p.neighbors[j].anchor) layout.free_neighbors.push_back(static_cast<int>(j));
  }
  return layout;
}

struct FullPoint {
  Vec self;
  std::vector<Vec> replicas;
};

FullPoint unpack(const LocalProblem& p, const FullLayout& layout, const Eigen::VectorXd& v) {
  const int n = p.dim();
  FullPoint pt;
  int off = 0;
  if (layout.self_free) {
    pt.self = v.segment(0, n);
    off = n;
  } else {
    pt.self = *p.anchor;
  }
  pt.replicas.resize(p.neighbors.size());
  for (std::size_t j = 0; j < p.neighbors.size(); ++j) {
    if (p.neighbors[j].anchor) pt.replicas[j] = *p.neighbors[j].anchor;
  }
  for (int j : layout.free_neighbors) {
    pt.replicas[j] = v.segment(off, n);
    off += n;
  }
  return pt;
}

Eigen::VectorXd pack(const FullLayout& layout, const Vec& self, const std::vector<Vec>& replicas) {
  const int n = static_cast<int>(self.size());
  const int count = (layout.self_free ? 1 : 0) + static_cast<int>(layout.free_neighbors.size());
  Eigen::VectorXd v(n * count);
  int off = 0;
  if (layout.self_free) {
    v.segment(0, n) = self;
    off = n;
  }
  for (int j : layout.free_neighbors) {
    v.segment(off, n) = replicas[j];
    off += n;
  }
  return v;
}

struct FullModel {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

FullModel full_model(const LocalProblem& p, const FullLayout& layout, const Eigen::VectorXd& v,
                     bool want_hessian) {
  const int n = p.dim();
  const double c = p.penalty;
  const double count = static_cast<double>(p.neighbors.size());
  const FullPoint pt = unpack(p, layout, v);

  std::vector<double> ranges;
  ranges.reserve(p.neighbors.size());
  for (const auto& nb : p.neighbors) ranges.push_back(nb.range);
  const NodeGradHess gh = node_grad_hess(pt.self, pt.replicas, ranges, p.mode);

  FullModel m;
  m.value = local_objective(p, pt.self, pt.replicas);
  m.gradient.resize(v.size());
  if (want_hessian) m.hessian = Eigen::MatrixXd::Zero(v.size(), v.size());

  // Map free variable blocks to blocks of the node layout [self, nb_1, ...].
  std::vector<int> block_of;
  if (layout.self_free) block_of.push_back(0);
  for (int j : layout.free_neighbors) block_of.push_back(j + 1);

  for (std::size_t b = 0; b < block_of.size(); ++b) {
    const int src = block_of[b] * n;
    Vec penalty_grad;
    double penalty_curv = 0.0;
    if (block_of[b] == 0) {
      penalty_grad = 2.0 * c * count * (pt.self - p.own_target);
      penalty_curv = 2.0 * c * count;
    } else {
      const int j = block_of[b] - 1;
      penalty_grad = 2.0 * c * (pt.replicas[j] - p.neighbors[j].target);
      penalty_curv = 2.0 * c;
    }
    m.gradient.segment(b * n, n) = gh.gradient.segment(src, n) + penalty_grad;
    if (!want_hessian) continue;
    for (std::size_t b2 = 0; b2 < block_of.size(); ++b2) {
      m.hessian.block(b * n, b2 * n, n, n) = gh.hessian.block(src, block_of[b2] * n, n, n);
    }
    m.hessian.block(b * n, b * n, n, n).diagonal().array() += penalty_curv;
  }
  return m;
}

Eigen::VectorXd minimize_bfgs(const LocalProblem& p, const FullLayout& layout, Eigen::VectorXd v,
                              const OracleOptions& opts) {
  const Eigen::Index dim = v.size();
  if (dim == 0) return v;
  Eigen::MatrixXd inv_h = Eigen::MatrixXd::Identity(dim, dim) / (2.0 * p.penalty + 1.0);
  FullModel m = full_model(p, layout, v, false);

  for (int it = 0; it < opts.max_iterations; ++it) {
    if (m.gradient.lpNorm<Eigen::Infinity>() < opts.gradient_tolerance) break;
    Eigen::VectorXd dir = -inv_h * m.gradient;
    double slope = m.gradient.dot(dir);
    if (!(slope < 0.0)) {
      inv_h = Eigen::MatrixXd::Identity(dim, dim) / (2.0 * p.penalty + 1.0);
      dir = -inv_h * m.gradient;
      slope = m.gradient.dot(dir);
    }
    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd next;
    FullModel mn;
    for (int h = 0; h < kMaxHalvings; ++h, t *= 0.5) {
      next = v + t * dir;
      mn = full_model(p, layout, next, false);
      if (mn.value <= m.value + kArmijoSlope * t * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
    const Eigen::VectorXd s = next - v;
    const Eigen::VectorXd y = mn.gradient - m.gradient;
    const double sy = s.dot(y);
    if (sy > 1e-14 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(dim, dim);
      inv_h = (eye - rho * s * y.transpose()) * inv_h * (eye - rho * y * s.transpose()) +
              rho * s * s.transpose();
    }
    v = std::move(next);
    m = std::move(mn);
  }

  // Newton polish where the Hessian is positive definite.
  for (int it = 0; it < 50; ++it) {
    FullModel full = full_model(p, layout, v, true);
    if (full.gradient.lpNorm<Eigen::Infinity>() < 1e-14) break;
    Eigen::LLT<Eigen::MatrixXd> llt(full.hessian);
    if (llt.info() != Eigen::Success) break;
    const Eigen::VectorXd dir = llt.solve(-full.gradient);
    const double slope = full.gradient.dot(dir);
    if (!(slope < 0.0)) break;
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h < kMaxHalvings; ++h, t *= 0.5) {
      const Eigen::VectorXd next = v + t * dir;
      if (full_model(p, layout, next, false).value <= full.value + kArmijoSlope * t * slope) {
        v = next;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }
  return v;
}

}  // namespace

void LocalProblem::validate() const {
  if (!(penalty > 0.0) || !std::isfinite(penalty)) {
    throw std::invalid_argument("local problem penalty must be positive and finite");
  }
  if (!all_finite(own_target) || (anchor && !all_finite(*anchor))) {
    throw std::invalid_argument("local problem has non-finite targets");
  }
  for (const auto& nb : neighbors) {
    if (!all_finite(nb.target) || !(nb.range >= 0.0) || !std::isfinite(nb.range) ||
        (nb.anchor && !all_finite(*nb.anchor))) {
      throw std::invalid_argument("local problem has a non-finite neighbor entry");
    }
  }
}

Vec anchor_replica_update(const Vec& anchor, const Vec& target, double range, double penalty,
                          CostMode mode, bool* degenerate) {
  const Vec diff = target - anchor;
  const double dist = diff.norm();
  if (mode == CostMode::Convex && dist <= range) return target;
  const double two_c = 2.0 * penalty;
  if (dist == 0.0) {
    if (degenerate) *degenerate = true;
    Vec x = anchor;
    x[0] += range / (1.0 + two_c);
    return x;
  }
  const double alpha = (range + two_c * dist) / (1.0 + two_c);
  return anchor + diff * (alpha / dist);
}

Vec replica_recovery(const Vec& self, const Vec& target, double range, double penalty,
                     CostMode mode, bool* degenerate) {
  return anchor_replica_update(self, target, range, penalty, mode, degenerate);
}

double local_objective(const LocalProblem& p, const Vec& self, const std::vector<Vec>& replicas) {
  const double c = p.penalty;
  double total = c * static_cast<double>(p.neighbors.size()) * (self - p.own_target).squaredNorm();
  for (std::size_t j = 0; j < p.neighbors.size(); ++j) {
    total += pair_cost(self - replicas[j], p.neighbors[j].range, p.mode);
    total += c * (replicas[j] - p.neighbors[j].target).squaredNorm();
  }
  return total;
}

double reduced_objective(const LocalProblem& p, const Vec& x, NeighborWeighting weighting) {
  return reduced_model(p, x, weighting).value;
}

namespace {

// Damped Newton on the reduced objective from x. Returns the iteration count.
int reduced_newton(const LocalProblem& p, Vec& x, const ReducedSolveOptions& opts) {
  int iterations = 0;
  for (int it = 0; it < opts.max_newton_iterations; ++it) {
    const ReducedModel m = reduced_model(p, x, opts.weighting);
    if (m.gradient.norm() <= opts.gradient_tolerance) break;

    Vec dir;
    Eigen::LLT<Mat> llt(m.hessian);
    if (llt.info() == Eigen::Success) dir = llt.solve(-m.gradient);
    if (dir.size() == 0 || !dir.allFinite() || !(m.gradient.dot(dir) < 0.0)) dir = -m.gradient;

    const double slope = m.gradient.dot(dir);
    double t = 1.0;
    bool accepted = false;
    for (int h = 0; h < kMaxHalvings; ++h, t *= 0.5) {
      Vec next = x + t * dir;
      clamp_to_box(next, opts.sanity_box);
      if (reduced_objective(p, next, opts.weighting) <= m.value + kArmijoSlope * t * slope) {
        x = next;
        accepted = true;
        break;
      }
    }
    ++iterations;
    if (!accepted) break;
  }
  return iterations;
}

}  // namespace

LocalSolution reduced_solve(const LocalProblem& p, const ReducedSolveOptions& opts) {
  p.validate();
  if (p.anchor) throw std::invalid_argument("reduced_solve called on an anchor node");
  if (opts.max_newton_iterations < 1) {
    throw std::invalid_argument("reduced_solve needs at least one Newton iteration");
  }

  LocalSolution out;
  Vec x = p.own_target;
  for (const auto& nb : p.neighbors) {
    if ((x - reduced_anchor_point(nb)).norm() < kCoincidence) {
      x[0] += kPerturbation;
      out.degenerate = true;
      break;
    }
  }

  std::vector<Vec> starts{x};
  if (opts.multi_start) {
    for (const auto& nb : p.neighbors) {
      const Vec& q = reduced_anchor_point(nb);
      const Vec d = x - q;
      if (d.norm() < kCoincidence) continue;
      const Vec u = d / d.norm();
      starts.push_back(q + nb.range * u);
      starts.push_back(q - nb.range * u);
    }
  }
  double best = std::numeric_limits<double>::infinity();
  for (Vec s : starts) {
    const int iters = reduced_newton(p, s, opts);
    out.newton_iterations += iters;
    const double v = reduced_objective(p, s, opts.weighting);
    if (v < best) {
      best = v;
      x = s;
    }
  }

  out.self = x;
  out.replicas.reserve(p.neighbors.size());
  for (const auto& nb : p.neighbors) {
    if (nb.anchor) {
      out.replicas.push_back(*nb.anchor);
    } else {
      bool degenerate = false;
      out.replicas.push_back(
          replica_recovery(x, nb.target, nb.range, p.penalty, p.mode, &degenerate));
      out.degenerate = out.degenerate || degenerate;
    }
  }
  return out;
}

LocalSolution solve_local(const LocalProblem& p, const ReducedSolveOptions& opts) {
  if (!p.anchor) return reduced_solve(p, opts);
  p.validate();
  LocalSolution out;
  out.self = *p.anchor;
  out.replicas.reserve(p.neighbors.size());
  for (const auto& nb : p.neighbors) {
    if (nb.anchor) {
      out.replicas.push_back(*nb.anchor);
    } else {
      bool degenerate = false;
      out.replicas.push_back(
          anchor_replica_update(*p.anchor, nb.target, nb.range, p.penalty, p.mode, &degenerate));
      out.degenerate = out.degenerate || degenerate;
    }
  }
  return out;
}

OracleSolution full_oracle_solve(const LocalProblem& p, const OracleOptions& opts) {
  p.validate();
  const FullLayout layout = full_layout(p);
  const int n = p.dim();

  Vec base_self = p.anchor ? *p.anchor : p.own_target;
  std::vector<Vec> base_replicas;
  double spread = 0.1;
  for (const auto& nb : p.neighbors) {
    base_replicas.push_back(nb.anchor ? *nb.anchor : nb.target);
    spread = std::max(spread, nb.range);
  }

  Rng rng(opts.seed);
  std::normal_distribution<double> gauss(0.0, spread);
  OracleSolution best;
  best.objective = std::numeric_limits<double>::infinity();

  for (int s = 0; s < std::max(1, opts.starts); ++s) {
    Vec self = base_self;
    std::vector<Vec> replicas = base_replicas;
    if (s > 0) {
      auto jitter = [&](Vec& v) {
        for (int d = 0; d < n; ++d) v[d] += gauss(rng);
      };
      if (layout.self_free) jitter(self);
      for (int j : layout.free_neighbors) jitter(replicas[j]);
    }
    const Eigen::VectorXd v = minimize_bfgs(p, layout, pack(layout, self, replicas), opts);
    FullPoint pt = unpack(p, layout, v);
    const double value = local_objective(p, pt.self, pt.replicas);
    if (value < best.objective) {
      best.objective = value;
      best.self = pt.self;
      best.replicas = std::move(pt.replicas);
    }
  }
  return best;
}

}  // namespace coloc

#include "coloc/objective.hpp"

#include <cassert>

namespace coloc {

double pair_cost(const Vec& z, double range, CostMode mode) {
  const double excess = z.norm() - range;
  return mode == CostMode::NonConvex ? 0.5 * excess * excess : step_quadratic(excess);
}

Vec pair_gradient(const Vec& z, double range, CostMode mode) {
  const double norm = z.norm();
  if (norm == 0.0) return Vec::Zero(z.size());
  return z * (active_part(norm - range, mode) / norm);
}

Mat pair_hessian(const Vec& z, double range, CostMode mode) {
  const auto n = z.size();
  const double norm = z.norm();
  if (norm == 0.0) return Mat::Zero(n, n);
  const double excess = norm - range;
  Mat h = Mat::Identity(n, n) * (active_part(excess, mode) / norm);
  h.noalias() += z * z.transpose() * (range * active_step(excess, mode) / (norm * norm * norm));
  return h;
}

double node_cost(const Vec& self, std::span<const Vec> replicas, std::span<const double> ranges,
                 CostMode mode) {
  assert(replicas.size() == ranges.size());
  double total = 0.0;
  for (std::size_t j = 0; j < replicas.size(); ++j) {
    total += pair_cost(self - replicas[j], ranges[j], mode);
  }
  return total;
}

NodeGradHess node_grad_hess(const Vec& self, std::span<const Vec> replicas,
                            std::span<const double> ranges, CostMode mode) {
  assert(replicas.size() == ranges.size());
  const Eigen::Index n = self.size();
  const Eigen::Index blocks = static_cast<Eigen::Index>(replicas.size()) + 1;

  NodeGradHess out;
  out.gradient = Eigen::VectorXd::Zero(n * blocks);
  out.hessian = Eigen::MatrixXd::Zero(n * blocks, n * blocks);

  for (std::size_t j = 0; j < replicas.size(); ++j) {
    const Vec z = self - replicas[j];
    if (z.norm() == 0.0) out.degenerate = true;
    const Vec a = pair_gradient(z, ranges[j], mode);
    const Mat b = pair_hessian(z, ranges[j], mode);
    const Eigen::Index off = n * (static_cast<Eigen::Index>(j) + 1);

    out.gradient.segment(0, n) += a;
    out.gradient.segment(off, n) -= a;

    out.hessian.block(0, 0, n, n) += b;
    out.hessian.block(0, off, n, n) -= b.transpose();
    out.hessian.block(off, 0, n, n) -= b;
    out.hessian.block(off, off, n, n) += b.transpose();
  }
  return out;
}

}  // namespace coloc

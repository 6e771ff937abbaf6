#include "loam/correspondence.hpp"

#include <Eigen/Eigenvalues>

namespace loam {

NeighborSet NeighborSet::From(const std::array<Eigen::Vector3d, kSize>& pts) {
  NeighborSet ns;
  ns.points = pts;
  for (const auto& p : pts) ns.mean += p;
  ns.mean /= kSize;
  for (const auto& p : pts) {
    const Eigen::Vector3d d = p - ns.mean;
    ns.covariance += d * d.transpose();
  }
  ns.covariance /= kSize;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(ns.covariance);
  ns.eigenvalues = solver.eigenvalues().reverse();  // descending
  return ns;
}

bool line_valid(const NeighborSet& ns) {
  return ns.eigenvalues[0] >= 3.0 * ns.eigenvalues[1];
}

bool plane_valid(const NeighborSet& ns) {
  return ns.eigenvalues[2] <= ns.eigenvalues[1] / 3.0;
}

std::optional<double> edge_residual(const Eigen::Vector3d& p_w, const NeighborSet& ns) {
  const Eigen::Vector3d& p1 = ns.points.front();
  const Eigen::Vector3d& p5 = ns.points.back();
  const double base = (p5 - p1).norm();
  if (base < 1e-6) return std::nullopt;
  return (p_w - p5).cross(p_w - p1).norm() / base;
}

std::optional<double> plane_residual(const Eigen::Vector3d& p_w, const NeighborSet& ns) {
  const Eigen::Vector3d& p1 = ns.points[0];
  const Eigen::Vector3d& p3 = ns.points[2];
  const Eigen::Vector3d& p5 = ns.points[4];
  const Eigen::Vector3d normal = (p3 - p5).cross(p3 - p1);
  const double len = normal.norm();
  if (len < 1e-9) return std::nullopt;
  return (p_w - p1).dot(normal) / len;
}

}  // namespace loam

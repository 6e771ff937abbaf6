#pragma once

#include <array>
#include <optional>

#include "loam/types.hpp"

namespace loam {

/// The 5 map neighbors of a projected feature point, ascending by distance
/// to the query, with their population mean/covariance eigen-structure.
struct NeighborSet {
  static constexpr int kSize = 5;

  std::array<Eigen::Vector3d, kSize> points;  // P_1 .. P_5
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();
  Eigen::Vector3d eigenvalues = Eigen::Vector3d::Zero();  // descending

  static NeighborSet From(const std::array<Eigen::Vector3d, kSize>& pts);
};

/// True iff the biggest eigenvalue is at least three times the second.
bool line_valid(const NeighborSet& ns);

/// True iff the smallest eigenvalue is at most a third of the second smallest.
bool plane_valid(const NeighborSet& ns);

/// Perpendicular distance from p_w to the line through P_1 and P_5:
///   |(P_w - P_5) x (P_w - P_1)| / |P_5 - P_1|
/// Empty when the anchor pair degenerates (|P_5 - P_1| < 1e-6 m).
std::optional<double> edge_residual(const Eigen::Vector3d& p_w, const NeighborSet& ns);

/// Signed distance from p_w to the plane through P_1, P_3, P_5:
///   (P_w - P_1)^T ((P_3 - P_5) x (P_3 - P_1)) / |(P_3 - P_5) x (P_3 - P_1)|
/// Empty when the anchor triple is collinear (normal below 1e-9).
std::optional<double> plane_residual(const Eigen::Vector3d& p_w, const NeighborSet& ns);

enum class FeatureKind { Edge, Plane };

/// One validated feature-to-map association used by the pose optimizer.
/// `body_point` is the feature in the (possibly deskewed) body frame of the
/// unit being optimized; `world_point` is its projection when the
/// correspondence was found.
struct Correspondence {
  FeatureKind kind = FeatureKind::Edge;
  Eigen::Vector3d body_point = Eigen::Vector3d::Zero();
  Eigen::Vector3d world_point = Eigen::Vector3d::Zero();
  NeighborSet neighbors;
  double residual = 0.0;  // meters; signed for planes
};

}  // namespace loam

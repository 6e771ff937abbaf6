#pragma once

#include <vector>

#include "loam/point_selection.hpp"
#include "loam/types.hpp"

namespace loam {

enum class FrameOfReference { Body, World };

struct FeaturePoint {
  Eigen::Vector3d position{0, 0, 0};
  float reflectivity = 0.f;
  float t_offset = 0.f;  // seconds since frame start
  std::uint32_t seq = 0;
};

/// Edge set (geometric edges merged with reflectivity edges) and plane set
/// extracted from one (sub-)frame. Sets are disjoint by seq.
struct FeatureCloud {
  std::vector<FeaturePoint> edges;
  std::vector<FeaturePoint> planes;
  FrameOfReference frame_of_reference = FrameOfReference::Body;

  bool empty() const { return edges.empty() && planes.empty(); }
};

/// LOAM-style local smoothness, scale-normalized:
///   c = || sum_{j != i} (P_j - P_i) || / (2w * ||P_i||)
/// `window` holds 2w+1 consecutive points with the candidate at the center.
double local_smoothness(const std::vector<Eigen::Vector3d>& window);

/// Indices (into `points`) of reflectivity edges: points whose reflectivity
/// deviates from the windowed median by at least `reflectivity_ratio`,
/// in runs of at least `reflectivity_min_run` consecutive candidates.
std::vector<std::size_t> reflectivity_edges(const std::vector<SelectedPoint>& points,
                                            const PipelineConfig& cfg);

/// Classifies selected points into edge and plane features by local
/// smoothness, capped per azimuthal sector, then merges reflectivity edges.
/// Smoothness windows never span scan-segment gaps.
FeatureCloud extract_features(const std::vector<SelectedPoint>& points,
                              const PipelineConfig& cfg);

}  // namespace loam

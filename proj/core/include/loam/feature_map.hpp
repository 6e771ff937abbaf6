#pragma once

#include <memory>
#include <unordered_map>
#include <vector>

#include "loam/correspondence.hpp"
#include "loam/kd_tree.hpp"
#include "loam/types.hpp"

namespace loam {

struct MapPoint {
  Eigen::Vector3d position{0, 0, 0};
  float reflectivity = 0.f;
};

/// Global feature map: edge and plane points in the world frame, density
/// bounded by a per-voxel occupancy cap, with an immutable KD-tree
/// generation per feature type. Indexes are built outside (possibly on a
/// background thread) and published with a single shared_ptr store.
class FeatureMap {
 public:
  explicit FeatureMap(double edge_voxel, double plane_voxel, int max_per_voxel);

  /// Inserts world-frame points subject to voxel dedup.
  /// Returns the number actually added.
  std::size_t insert(FeatureKind kind, const std::vector<MapPoint>& world_points);

  const std::vector<Eigen::Vector3d>& points(FeatureKind kind) const;
  const std::vector<float>& reflectivities(FeatureKind kind) const;
  std::size_t size(FeatureKind kind) const { return points(kind).size(); }

  std::shared_ptr<const KdTree> index(FeatureKind kind) const;
  void publish_index(FeatureKind kind, std::shared_ptr<const KdTree> tree);

  /// Builds a fresh index generation from the current points of `kind`.
  std::shared_ptr<const KdTree> build_index(FeatureKind kind) const;

  std::uint64_t registered_frames = 0;

 private:
  struct Layer {
    double voxel_size;
    std::vector<Eigen::Vector3d> points;
    std::vector<float> reflectivities;
    std::unordered_map<std::uint64_t, std::uint16_t> voxel_counts;
    std::shared_ptr<const KdTree> index = std::make_shared<KdTree>();
    std::uint64_t next_generation = 1;
  };

  Layer& layer(FeatureKind kind) { return kind == FeatureKind::Edge ? edges_ : planes_; }
  const Layer& layer(FeatureKind kind) const {
    return kind == FeatureKind::Edge ? edges_ : planes_;
  }

  Layer edges_;
  Layer planes_;
  int max_per_voxel_;
};

}  // namespace loam

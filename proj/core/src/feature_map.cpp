#include "loam/feature_map.hpp"

#include <atomic>
#include <cmath>

namespace loam {

namespace {

std::uint64_t voxel_key(const Eigen::Vector3d& p, double cell) {
  const auto q = [cell](double v) {
    return static_cast<std::uint64_t>(
               static_cast<std::int64_t>(std::floor(v / cell)) + (1ll << 20)) &
           0x1FFFFF;  // 21 bits per axis
  };
  return (q(p.x()) << 42) | (q(p.y()) << 21) | q(p.z());
}

}  // namespace

FeatureMap::FeatureMap(double edge_voxel, double plane_voxel, int max_per_voxel)
    : max_per_voxel_(max_per_voxel) {
  edges_.voxel_size = edge_voxel;
  planes_.voxel_size = plane_voxel;
}

std::size_t FeatureMap::insert(FeatureKind kind, const std::vector<MapPoint>& world_points) {
  Layer& l = layer(kind);
  std::size_t added = 0;
  for (const MapPoint& mp : world_points) {
    auto& count = l.voxel_counts[voxel_key(mp.position, l.voxel_size)];
    if (count >= max_per_voxel_) continue;
    ++count;
    l.points.push_back(mp.position);
    l.reflectivities.push_back(mp.reflectivity);
    ++added;
  }
  return added;
}

const std::vector<Eigen::Vector3d>& FeatureMap::points(FeatureKind kind) const {
  return layer(kind).points;
}

const std::vector<float>& FeatureMap::reflectivities(FeatureKind kind) const {
  return layer(kind).reflectivities;
}

std::shared_ptr<const KdTree> FeatureMap::index(FeatureKind kind) const {
  return std::atomic_load(&layer(kind).index);
}

void FeatureMap::publish_index(FeatureKind kind, std::shared_ptr<const KdTree> tree) {
  std::atomic_store(&layer(kind).index, std::move(tree));
}

std::shared_ptr<const KdTree> FeatureMap::build_index(FeatureKind kind) const {
  const Layer& l = layer(kind);
  return std::make_shared<const KdTree>(l.points, l.index ? l.index->generation() + 1 : 1);
}

}  // namespace loam

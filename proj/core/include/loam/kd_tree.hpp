#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

namespace loam {

/// Balanced median-split KD-tree over 3D points, immutable after
/// construction. Queries are exact; equal distances break ties by insertion
/// order. A generation counter lets the map publish successive rebuilds
/// atomically while readers keep using the previous generation.
class KdTree {
 public:
  struct Hit {
    std::uint32_t index;  // insertion order of the point
    double distance;      // Euclidean
  };

  KdTree() = default;
  explicit KdTree(std::vector<Eigen::Vector3d> points, std::uint64_t generation = 0);

  /// k nearest points by Euclidean distance, ascending; fewer if the index
  /// holds fewer than k points.
  std::vector<Hit> knn(const Eigen::Vector3d& query, int k) const;

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  std::uint64_t generation() const { return generation_; }
  const Eigen::Vector3d& point(std::uint32_t index) const { return points_[index]; }
  const std::vector<Eigen::Vector3d>& points() const { return points_; }

 private:
  struct Node {
    int axis = -1;        // -1 marks a leaf
    double split = 0.0;
    std::int32_t left = -1;
    std::int32_t right = -1;
    std::uint32_t begin = 0;  // leaf range into order_
    std::uint32_t end = 0;
  };

  std::int32_t build(std::uint32_t begin, std::uint32_t end);
  void search(std::int32_t node, const Eigen::Vector3d& q, int k,
              std::vector<Hit>& heap) const;

  std::vector<Eigen::Vector3d> points_;
  std::vector<std::uint32_t> order_;
  std::vector<Node> nodes_;
  std::int32_t root_ = -1;
  std::uint64_t generation_ = 0;

  static constexpr std::uint32_t kLeafSize = 8;
};

}  // namespace loam

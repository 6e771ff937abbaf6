#include "loam/kd_tree.hpp"

#include <algorithm>
#include <numeric>

namespace loam {

namespace {

// Worse-first ordering for the bounded result heap: larger distance first,
// then larger insertion index, so ties resolve to the earliest point.
inline bool worse(const KdTree::Hit& a, const KdTree::Hit& b) {
  if (a.distance != b.distance) return a.distance < b.distance;
  return a.index < b.index;
}

}  // namespace

KdTree::KdTree(std::vector<Eigen::Vector3d> points, std::uint64_t generation)
    : points_(std::move(points)), generation_(generation) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), 0u);
  nodes_.reserve(points_.empty() ? 0 : 2 * points_.size() / kLeafSize + 2);
  if (!points_.empty()) root_ = build(0, static_cast<std::uint32_t>(points_.size()));
}

std::int32_t KdTree::build(std::uint32_t begin, std::uint32_t end) {
  const std::int32_t id = static_cast<std::int32_t>(nodes_.size());
  nodes_.emplace_back();
  if (end - begin <= kLeafSize) {
    nodes_[id].begin = begin;
    nodes_[id].end = end;
    return id;
  }
  Eigen::Vector3d lo = points_[order_[begin]], hi = lo;
  for (std::uint32_t i = begin + 1; i < end; ++i) {
    lo = lo.cwiseMin(points_[order_[i]]);
    hi = hi.cwiseMax(points_[order_[i]]);
  }
  int axis = 0;
  (hi - lo).maxCoeff(&axis);

  const std::uint32_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                   [&](std::uint32_t a, std::uint32_t b) {
                     const double pa = points_[a][axis], pb = points_[b][axis];
                     return pa != pb ? pa < pb : a < b;
                   });
  const double split = points_[order_[mid]][axis];
  const std::int32_t left = build(begin, mid);
  const std::int32_t right = build(mid, end);
  nodes_[id].axis = axis;
  nodes_[id].split = split;
  nodes_[id].left = left;
  nodes_[id].right = right;
  return id;
}

void KdTree::search(std::int32_t node_id, const Eigen::Vector3d& q, int k,
                    std::vector<Hit>& heap) const {
  const Node& node = nodes_[node_id];
  if (node.axis < 0) {
    for (std::uint32_t i = node.begin; i < node.end; ++i) {
      const std::uint32_t idx = order_[i];
      const Hit hit{idx, (points_[idx] - q).norm()};
      if (heap.size() < static_cast<std::size_t>(k)) {
        heap.push_back(hit);
        std::push_heap(heap.begin(), heap.end(), worse);
      } else if (worse(hit, heap.front())) {
        std::pop_heap(heap.begin(), heap.end(), worse);
        heap.back() = hit;
        std::push_heap(heap.begin(), heap.end(), worse);
      }
    }
    return;
  }
  const double delta = q[node.axis] - node.split;
  const std::int32_t near = delta < 0 ? node.left : node.right;
  const std::int32_t far = delta < 0 ? node.right : node.left;
  search(near, q, k, heap);
  if (heap.size() < static_cast<std::size_t>(k) || std::abs(delta) <= heap.front().distance)
    search(far, q, k, heap);
}

std::vector<KdTree::Hit> KdTree::knn(const Eigen::Vector3d& query, int k) const {
  std::vector<Hit> heap;
  if (k < 1 || points_.empty()) return heap;
  heap.reserve(k);
  search(root_, query, k, heap);
  std::sort(heap.begin(), heap.end(), [](const Hit& a, const Hit& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.index < b.index;
  });
  return heap;
}

}  // namespace loam

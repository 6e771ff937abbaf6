#include <doctest.h>

#include <algorithm>
#include <random>

#include "loam/kd_tree.hpp"

using namespace loam;

namespace {

// Linear-scan oracle with the same (distance, insertion index) ordering.
std::vector<KdTree::Hit> brute_knn(const std::vector<Eigen::Vector3d>& pts,
                                   const Eigen::Vector3d& q, int k) {
  std::vector<KdTree::Hit> all;
  all.reserve(pts.size());
  for (std::uint32_t i = 0; i < pts.size(); ++i)
    all.push_back({i, (pts[i] - q).norm()});
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.index < b.index;
  });
  if (static_cast<int>(all.size()) > k) all.resize(k);
  return all;
}

std::vector<Eigen::Vector3d> random_points(std::size_t n, std::uint64_t seed,
                                           double extent = 20.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-extent, extent);
  std::vector<Eigen::Vector3d> pts(n);
  for (auto& p : pts) p = {u(rng), u(rng), u(rng)};
  return pts;
}

}  // namespace

TEST_CASE("empty index returns no hits") {
  KdTree tree;
  CHECK(tree.empty());
  CHECK(tree.knn({0, 0, 0}, 5).empty());
}

TEST_CASE("underfilled index returns all points") {
  KdTree tree(random_points(3, 1));
  const auto hits = tree.knn({0, 0, 0}, 5);
  CHECK(hits.size() == 3);
  CHECK(hits[0].distance <= hits[1].distance);
  CHECK(hits[1].distance <= hits[2].distance);
}

TEST_CASE("exact self-query on a grid") {
  std::vector<Eigen::Vector3d> pts;
  for (int x = 0; x < 5; ++x)
    for (int y = 0; y < 5; ++y)
      for (int z = 0; z < 5; ++z) pts.push_back({double(x), double(y), double(z)});
  KdTree tree(pts);
  for (std::uint32_t i = 0; i < pts.size(); ++i) {
    const auto hits = tree.knn(pts[i], 1);
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].index == i);
    CHECK(hits[0].distance == 0.0);
  }
}

TEST_CASE("duplicate points tie-break by insertion order") {
  std::vector<Eigen::Vector3d> pts(6, Eigen::Vector3d(1, 2, 3));
  pts.push_back({5, 5, 5});
  KdTree tree(pts);
  const auto hits = tree.knn({1, 2, 3}, 6);
  REQUIRE(hits.size() == 6);
  for (std::uint32_t i = 0; i < 6; ++i) {
    CHECK(hits[i].index == i);
    CHECK(hits[i].distance == 0.0);
  }
}

TEST_CASE("knn agrees with the linear-scan oracle") {
  const auto pts = random_points(2000, 77);
  KdTree tree(pts);
  std::mt19937_64 rng(78);
  std::uniform_real_distribution<double> u(-25, 25);
  for (int q = 0; q < 300; ++q) {
    const Eigen::Vector3d query(u(rng), u(rng), u(rng));
    for (int k : {1, 5, 9}) {
      const auto got = tree.knn(query, k);
      const auto expect = brute_knn(pts, query, k);
      REQUIRE(got.size() == expect.size());
      for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].index == expect[i].index);
        CHECK(got[i].distance == doctest::Approx(expect[i].distance).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("clustered points with exact ties match the oracle") {
  // lattice-aligned points create many exactly equal distances
  std::vector<Eigen::Vector3d> pts;
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> g(-4, 4);
  for (int i = 0; i < 600; ++i)
    pts.push_back({double(g(rng)), double(g(rng)), double(g(rng))});
  KdTree tree(pts);
  for (int q = 0; q < 100; ++q) {
    const Eigen::Vector3d query(double(g(rng)), double(g(rng)), double(g(rng)));
    const auto got = tree.knn(query, 7);
    const auto expect = brute_knn(pts, query, 7);
    REQUIRE(got.size() == expect.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(got[i].index == expect[i].index);
  }
}

TEST_CASE("generation counter is preserved") {
  KdTree tree(random_points(10, 9), 42);
  CHECK(tree.generation() == 42);
}

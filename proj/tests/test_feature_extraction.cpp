#include <doctest.h>

#include <map>
#include <random>
#include <set>

#include "loam/feature_extraction.hpp"
#include "test_support.hpp"

using namespace loam;

namespace {

SelectedPoint sel(const Eigen::Vector3d& pos, std::uint32_t seq, float refl = 1.f) {
  SelectedPoint sp;
  sp.point.position = pos;
  sp.point.seq = seq;
  sp.point.reflectivity = refl;
  sp.point.t_offset = 1e-5f * seq;
  return sp;
}

// Horizontal scan row across a 90-degree corner: x = depth - |y|.
std::vector<SelectedPoint> corner_row(double depth, double h, int half_count) {
  std::vector<SelectedPoint> pts;
  std::uint32_t seq = 0;
  for (int j = -half_count; j <= half_count; ++j) {
    const double y = j * h;
    pts.push_back(sel({depth - std::abs(y), y, 0}, seq++));
  }
  return pts;
}

}  // namespace

TEST_CASE("smoothness of evenly spaced collinear points is zero") {
  std::vector<Eigen::Vector3d> window;
  for (int j = -5; j <= 5; ++j) window.push_back(Eigen::Vector3d(8, 0.01 * j, 0));
  CHECK(local_smoothness(window) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("smoothness at a corner matches the closed form") {
  // x = 5 - |y|, spacing h: sum of differences is -2h(1+..+w) along x,
  // lateral parts cancel, so c = 2h*w(w+1)/2 / (2w * 5)
  const double h = 0.1;
  std::vector<Eigen::Vector3d> window;
  for (int j = -5; j <= 5; ++j) window.push_back(Eigen::Vector3d(5 - std::abs(j * h), j * h, 0));
  const double expect = (2 * h * 15.0) / (10.0 * 5.0);
  CHECK(local_smoothness(window) == doctest::Approx(expect).epsilon(1e-9));
  CHECK(local_smoothness(window) > 0.05);
}

TEST_CASE("smoothness is invariant to uniform scaling") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<Eigen::Vector3d> window, scaled;
    for (int j = 0; j < 11; ++j) {
      const Eigen::Vector3d p(6 + u(rng), u(rng), u(rng));
      window.push_back(p);
      scaled.push_back(3.7 * p);
    }
    CHECK(local_smoothness(scaled) ==
          doctest::Approx(local_smoothness(window)).epsilon(1e-12));
  }
}

TEST_CASE("corner row yields an edge at the corner and planes on the arms") {
  PipelineConfig cfg;
  cfg.max_edge_per_sector = 1;
  const auto pts = corner_row(5.0, 0.1, 15);
  const FeatureCloud cloud = extract_features(pts, cfg);

  REQUIRE_FALSE(cloud.edges.empty());
  const Eigen::Vector3d corner(5, 0, 0);
  for (const auto& e : cloud.edges) CHECK((e.position - corner).norm() <= 0.02);

  REQUIRE_FALSE(cloud.planes.empty());
  for (const auto& p : cloud.planes) CHECK((p.position - corner).norm() >= 0.25);
}

TEST_CASE("flat scan rows produce planes and no geometric edges") {
  PipelineConfig cfg;
  std::vector<SelectedPoint> pts;
  std::uint32_t seq = 0;
  for (int row = 0; row < 3; ++row) {
    for (int j = 0; j <= 40; ++j)
      pts.push_back(sel({8.0, -1.0 + 0.05 * j, 0.2 * row}, seq++));
    seq += 10;  // scan gap between rows, forces a segment break
  }
  const FeatureCloud cloud = extract_features(pts, cfg);
  CHECK(cloud.edges.empty());
  CHECK(cloud.planes.size() > 10);
}

TEST_CASE("edge and plane sets are disjoint by seq") {
  PipelineConfig cfg;
  const auto pts = corner_row(5.0, 0.1, 15);
  const FeatureCloud cloud = extract_features(pts, cfg);
  std::set<std::uint32_t> edges, planes;
  for (const auto& e : cloud.edges) edges.insert(e.seq);
  for (const auto& p : cloud.planes) planes.insert(p.seq);
  for (const auto s : planes) CHECK(edges.count(s) == 0);
}

TEST_CASE("classification is equivariant under sector-aligned rotation") {
  PipelineConfig cfg;
  cfg.max_edge_per_sector = 1;
  const auto pts = corner_row(5.0, 0.1, 15);
  const Eigen::Matrix3d rot =
      Eigen::AngleAxisd(deg2rad(60), Eigen::Vector3d::UnitX()).toRotationMatrix();
  std::vector<SelectedPoint> rotated = pts;
  for (auto& sp : rotated) sp.point.position = rot * sp.point.position;

  const FeatureCloud a = extract_features(pts, cfg);
  const FeatureCloud b = extract_features(rotated, cfg);
  REQUIRE(a.edges.size() == b.edges.size());
  REQUIRE(a.planes.size() == b.planes.size());
  auto by_seq = [](const FeatureCloud& c) {
    std::map<std::uint32_t, Eigen::Vector3d> m;
    for (const auto& e : c.edges) m[e.seq] = e.position;
    for (const auto& p : c.planes) m[p.seq] = p.position;
    return m;
  };
  const auto ma = by_seq(a);
  const auto mb = by_seq(b);
  REQUIRE(ma.size() == mb.size());
  for (const auto& [seq, pos] : ma) {
    REQUIRE(mb.count(seq) == 1);
    CHECK((mb.at(seq) - rot * pos).norm() < 1e-12);
  }
}

TEST_CASE("uniform reflectivity yields no reflectivity edges") {
  PipelineConfig cfg;
  std::vector<SelectedPoint> pts;
  for (int j = 0; j < 60; ++j) pts.push_back(sel({8, -1.5 + 0.05 * j, 0}, j, 2.f));
  CHECK(reflectivity_edges(pts, cfg).empty());
}

TEST_CASE("a reflectivity stripe is flagged, a single spike suppressed") {
  PipelineConfig cfg;
  std::vector<SelectedPoint> pts;
  for (int j = 0; j < 60; ++j) {
    const bool stripe = (j >= 25 && j < 30);
    pts.push_back(sel({8, -1.5 + 0.05 * j, 0}, j, stripe ? 10.f : 2.f));
  }
  const auto idx = reflectivity_edges(pts, cfg);
  REQUIRE_FALSE(idx.empty());
  for (const auto i : idx) {
    CHECK(i >= 25);
    CHECK(i < 30);
  }
  CHECK(idx.size() == 5);

  std::vector<SelectedPoint> spike;
  for (int j = 0; j < 60; ++j)
    spike.push_back(sel({8, -1.5 + 0.05 * j, 0}, j, j == 30 ? 10.f : 2.f));
  CHECK(reflectivity_edges(spike, cfg).empty());
}

TEST_CASE("reflectivity edges merge into the edge set without seq duplicates") {
  PipelineConfig cfg;
  std::vector<SelectedPoint> pts;
  for (int j = 0; j < 60; ++j) {
    const bool stripe = (j >= 25 && j < 30);
    pts.push_back(sel({8, -1.5 + 0.05 * j, 0}, j, stripe ? 10.f : 2.f));
  }
  const FeatureCloud cloud = extract_features(pts, cfg);
  std::set<std::uint32_t> seqs;
  for (const auto& e : cloud.edges) CHECK(seqs.insert(e.seq).second);
  CHECK(cloud.edges.size() == 5);  // geometry is flat; all edges are material edges
}

TEST_CASE("degenerate inputs yield empty clouds") {
  PipelineConfig cfg;
  CHECK(extract_features({}, cfg).empty());
  std::vector<SelectedPoint> few;
  for (int j = 0; j < 2 * cfg.smoothness_half_window; ++j)
    few.push_back(sel({5, 0.01 * j, 0}, j));
  CHECK(extract_features(few, cfg).empty());
}

TEST_CASE("windows never span segment gaps") {
  PipelineConfig cfg;
  // two flat runs separated by a big spatial gap; a window crossing the gap
  // would create spurious edges
  std::vector<SelectedPoint> pts;
  std::uint32_t seq = 0;
  for (int j = 0; j <= 20; ++j) pts.push_back(sel({8, -1.0 + 0.05 * j, 0}, seq++));
  for (int j = 0; j <= 20; ++j) pts.push_back(sel({12, 2.0 + 0.05 * j, 1}, seq++));
  const FeatureCloud cloud = extract_features(pts, cfg);
  CHECK(cloud.edges.empty());
}

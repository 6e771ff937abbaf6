#include <doctest.h>

#include <random>

#include "loam/types.hpp"
#include "test_support.hpp"

using namespace loam;

namespace {

Eigen::Matrix4d homogeneous(const Pose& p) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = p.rotation();
  m.topRightCorner<3, 1>() = p.translation;
  return m;
}

}  // namespace

TEST_CASE("pose identity composes trivially") {
  std::mt19937_64 rng(7);
  const Pose p = testsup::random_pose(rng);
  const Pose id = Pose::Identity();
  CHECK((compose(id, p).translation - p.translation).norm() == doctest::Approx(0.0));
  CHECK(compose(id, p).orientation.angularDistance(p.orientation) ==
        doctest::Approx(0.0));
  CHECK((compose(p, id).translation - p.translation).norm() == doctest::Approx(0.0));
}

TEST_CASE("compose example: rotation then translation chains") {
  Pose a;
  a.orientation = Eigen::Quaterniond(Eigen::AngleAxisd(kPi / 2, Eigen::Vector3d::UnitZ()));
  a.translation = {1, 0, 0};
  Pose b;
  b.translation = {1, 0, 0};
  const Pose c = compose(a, b);
  CHECK(c.translation.x() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.translation.y() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.translation.z() == doctest::Approx(0.0));
}

TEST_CASE("compose matches homogeneous-matrix oracle") {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 200; ++i) {
    const Pose a = testsup::random_pose(rng);
    const Pose b = testsup::random_pose(rng);
    const Eigen::Matrix4d expect = homogeneous(a) * homogeneous(b);
    const Eigen::Matrix4d got = homogeneous(compose(a, b));
    CHECK((expect - got).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("inverse is a two-sided inverse over 1000 random poses") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 1000; ++i) {
    const Pose p = testsup::random_pose(rng);
    const Pose left = compose(inverse(p), p);
    const Pose right = compose(p, inverse(p));
    CHECK(left.translation.norm() < 1e-9);
    CHECK(right.translation.norm() < 1e-9);
    CHECK(left.orientation.angularDistance(Eigen::Quaterniond::Identity()) < 1e-9);
    CHECK(right.orientation.angularDistance(Eigen::Quaterniond::Identity()) < 1e-9);
  }
}

TEST_CASE("transform_point distributes over composition") {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 500; ++i) {
    const Pose a = testsup::random_pose(rng);
    const Pose b = testsup::random_pose(rng);
    const Eigen::Vector3d x(std::uniform_real_distribution<double>(-5, 5)(rng),
                            std::uniform_real_distribution<double>(-5, 5)(rng),
                            std::uniform_real_distribution<double>(-5, 5)(rng));
    const Eigen::Vector3d lhs = transform_point(compose(a, b), x);
    const Eigen::Vector3d rhs = transform_point(a, transform_point(b, x));
    CHECK((lhs - rhs).norm() < 1e-9);
  }
}

TEST_CASE("rotations stay orthonormal under long composition chains") {
  std::mt19937_64 rng(3);
  Pose acc = Pose::Identity();
  for (int i = 0; i < 2000; ++i) acc = compose(acc, testsup::random_pose(rng, 0.1));
  const Eigen::Matrix3d r = acc.rotation();
  CHECK((r * r.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(r.determinant() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("config validation rejects out-of-range thresholds") {
  PipelineConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.intensity_high = cfg.intensity_low;  // empty window
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = PipelineConfig{};
  cfg.optimizer.trim_fraction = 0.5;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = PipelineConfig{};
  cfg.subframes = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = PipelineConfig{};
  cfg.c_edge = cfg.c_plane;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

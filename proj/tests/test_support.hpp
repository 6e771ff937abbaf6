#pragma once

// Shared scene builders and small numeric oracles for the test suites.

#include <random>
#include <vector>

#include "loam/metrics.hpp"
#include "loam/simulator.hpp"
#include "loam/types.hpp"

namespace loam::testsup {

inline Pose random_pose(std::mt19937_64& rng, double t_range = 10.0) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(-t_range, t_range);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  Pose p;
  p.orientation = q;
  p.translation = {u(rng), u(rng), u(rng)};
  return p;
}

inline sim::Primitive wall(const Eigen::Vector3d& center, const Eigen::Vector3d& normal,
                           const Eigen::Vector3d& u_axis, double half_u, double half_v,
                           double reflectivity) {
  sim::Primitive p;
  p.type = sim::Primitive::Type::Rect;
  p.center = center;
  p.normal = normal.normalized();
  p.u_axis = (u_axis - u_axis.dot(p.normal) * p.normal).normalized();
  p.half_u = half_u;
  p.half_v = half_v;
  p.reflectivity = reflectivity;
  return p;
}

inline sim::Primitive clutter_box(const Eigen::Vector3d& center,
                                  const Eigen::Vector3d& half_extents, double reflectivity) {
  sim::Primitive p;
  p.type = sim::Primitive::Type::Box;
  p.center = center;
  p.half_extents = half_extents;
  p.reflectivity = reflectivity;
  return p;
}

/// Closed room seen from the origin looking down +X: far wall, angled side
/// walls inside the FoV cone, floor/ceiling patches, and clutter boxes.
inline sim::Scene room_scene() {
  sim::Scene s;
  s.primitives.push_back(wall({9, 0, 0}, {-1, 0, 0}, {0, 1, 0}, 6, 6, 3.0));
  // angled panels around the outer annulus of the view cone; the center
  // stays open to the far wall so both are visible in every frame
  s.primitives.push_back(wall({7, 2.8, 0}, {-0.8, -0.6, 0}, {0, 0, 1}, 1.5, 1.5, 2.5));
  s.primitives.push_back(wall({7, -2.8, 0}, {-0.8, 0.6, 0}, {0, 0, 1}, 1.5, 1.5, 2.5));
  s.primitives.push_back(wall({7, 0, 2.8}, {-0.8, 0, -0.6}, {0, 1, 0}, 1.5, 1.5, 2.2));
  s.primitives.push_back(wall({7, 0, -2.8}, {-0.8, 0, 0.6}, {0, 1, 0}, 1.5, 1.5, 2.2));
  s.primitives.push_back(clutter_box({5.5, 0.8, -0.5}, {0.4, 0.4, 0.6}, 1.2));
  s.primitives.push_back(clutter_box({6.0, -1.2, 0.4}, {0.3, 0.5, 0.4}, 1.0));
  // narrow reflectivity stripes just proud of the far wall, for
  // material-boundary edges; thin enough that a scan crossing spans only a
  // few samples
  s.primitives.push_back(wall({8.9999, 1.0, 0}, {-1, 0, 0}, {0, 0, 1}, 1.5, 0.04, 6.0));
  s.primitives.push_back(wall({8.9999, -0.8, 0.5}, {-1, 0, 0}, {0, 1, 0}, 1.2, 0.04, 6.0));
  return s;
}

/// Dome of tilted panels tiling every direction a narrow view cone visits
/// while the sensor oscillates up to +/-30 deg about any axis, plus a shell
/// of near-field clutter boxes. The varied panel normals keep all six pose
/// degrees of freedom observable from any orientation in that range.
inline sim::Scene rotunda_scene(double radius = 8.5) {
  sim::Scene s;
  int k = 0;
  for (int ia = -3; ia <= 3; ++ia) {
    for (int ie = -3; ie <= 3; ++ie, ++k) {
      const double az = deg2rad(15.0 * ia);
      const double el = deg2rad(15.0 * ie);
      const Eigen::Vector3d dir(std::cos(el) * std::cos(az),
                                std::cos(el) * std::sin(az), std::sin(el));
      // tilt each panel off the radial direction, cycling the tilt axis, so
      // neighboring panels present distinct normals
      const double tilt = deg2rad(18.0);
      const Eigen::Vector3d axis = (k % 2 == 0)
                                       ? Eigen::Vector3d(0, 0, 1)
                                       : dir.cross(Eigen::Vector3d(0, 0, 1)).normalized();
      const Eigen::Vector3d n =
          Eigen::AngleAxisd((k % 4 < 2 ? tilt : -tilt), axis) * (-dir);
      s.primitives.push_back(wall(radius * dir, n,
                                  Eigen::Vector3d(0, 0, 1).cross(dir).normalized(),
                                  1.15, 1.15, 2.0 + 0.6 * (k % 4)));
    }
  }
  for (int ia = -2; ia <= 2; ++ia) {
    for (int ie = -2; ie <= 2; ++ie) {
      if ((ia + ie) % 2 != 0) continue;
      const double az = deg2rad(22.0 * ia + 8.0);
      const double el = deg2rad(22.0 * ie - 6.0);
      const double rb = 4.5 + 0.4 * ((ia * 5 + ie + 12) % 3);
      const Eigen::Vector3d dir(std::cos(el) * std::cos(az),
                                std::cos(el) * std::sin(az), std::sin(el));
      s.primitives.push_back(clutter_box(rb * dir, {0.3, 0.35, 0.4},
                                         1.0 + 0.2 * ((ia + ie + 8) % 3)));
    }
  }
  return s;
}

/// Straight corridor along +X with staggered clutter boxes and reflectivity
/// stripes; traversable for `length` meters.
inline sim::Scene corridor_scene(double length = 110.0) {
  sim::Scene s;
  const double half_w = 3.0, half_h = 2.0;
  s.primitives.push_back(wall({length / 2, half_w, 0}, {0, -1, 0}, {1, 0, 0},
                              length / 2 + 10, half_h, 2.5));
  s.primitives.push_back(wall({length / 2, -half_w, 0}, {0, 1, 0}, {1, 0, 0},
                              length / 2 + 10, half_h, 2.5));
  s.primitives.push_back(wall({length / 2, 0, -half_h}, {0, 0, 1}, {1, 0, 0},
                              length / 2 + 10, half_w, 2.0));
  s.primitives.push_back(wall({length / 2, 0, half_h}, {0, 0, -1}, {1, 0, 0},
                              length / 2 + 10, half_w, 2.0));
  s.primitives.push_back(wall({length + 12, 0, 0}, {-1, 0, 0}, {0, 1, 0}, half_w,
                              half_h, 6.0));
  for (int i = 0; i < static_cast<int>(length / 2.5) + 4; ++i) {
    const double x = 4.0 + 2.5 * i;
    const double side = (i % 2 == 0) ? 1.0 : -1.0;
    s.primitives.push_back(clutter_box({x, side * (half_w - 0.45), -half_h + 0.5},
                                       {0.35, 0.45, 0.5 + 0.15 * (i % 3)},
                                       1.2 + 0.3 * (i % 3)));
    // face-on panels hanging on both side walls, angled toward the corridor
    // axis, and on floor/ceiling; every viewing direction of the scan
    // pattern meets surfaces whose normals span all axes
    s.primitives.push_back(wall({x + 1.0, half_w - 0.3, 0.3 * side},
                                {-0.85, -0.53, 0}, {0, 0, 1}, 0.7, 0.7,
                                2.0 + 0.4 * (i % 2)));
    s.primitives.push_back(wall({x + 2.2, -(half_w - 0.3), -0.3 * side},
                                {-0.85, 0.53, 0}, {0, 0, 1}, 0.7, 0.7,
                                2.2 + 0.3 * (i % 2)));
    s.primitives.push_back(wall({x + 0.4, 0.8 * side, half_h - 0.25},
                                {-0.8, 0, -0.6}, {0, 1, 0}, 0.6, 0.6,
                                1.8 + 0.3 * (i % 3)));
    s.primitives.push_back(wall({x + 1.6, -0.8 * side, -(half_h - 0.25)},
                                {-0.8, 0, 0.6}, {0, 1, 0}, 0.6, 0.6,
                                1.9 + 0.2 * (i % 3)));
    if (i % 3 == 0)
      s.primitives.push_back(wall({x + 0.8, side * (half_w - 0.01), 0},
                                  {0, -side, 0}, {1, 0, 0}, 0.3, 1.0, 5.0));
  }
  return s;
}

inline sim::Trajectory static_trajectory() { return {}; }

inline sim::Trajectory forward_trajectory(double speed) {
  sim::Trajectory t;
  t.px.poly = {0.0, speed};
  return t;
}

/// Truth patches for plane-thickness metrics: every Rect in the scene.
inline std::vector<TruthPlane> truth_planes(const sim::Scene& scene) {
  std::vector<TruthPlane> out;
  for (const auto& p : scene.primitives) {
    if (p.type != sim::Primitive::Type::Rect) continue;
    TruthPlane tp;
    tp.center = p.center;
    tp.normal = p.normal;
    tp.u_axis = p.u_axis;
    tp.half_u = p.half_u;
    tp.half_v = p.half_v;
    out.push_back(tp);
  }
  return out;
}

// --- independent eigenvalue oracle (characteristic polynomial) -------------

/// Eigenvalues of a symmetric 3x3 matrix, descending, via the trigonometric
/// solution of the characteristic cubic. Independent of Eigen's solver.
inline Eigen::Vector3d symmetric_eigenvalues_oracle(const Eigen::Matrix3d& a) {
  const double p1 = a(0, 1) * a(0, 1) + a(0, 2) * a(0, 2) + a(1, 2) * a(1, 2);
  const double q = a.trace() / 3.0;
  if (p1 < 1e-30) {
    Eigen::Vector3d d(a(0, 0), a(1, 1), a(2, 2));
    std::sort(d.data(), d.data() + 3, std::greater<double>());
    return d;
  }
  const double p2 = (a(0, 0) - q) * (a(0, 0) - q) + (a(1, 1) - q) * (a(1, 1) - q) +
                    (a(2, 2) - q) * (a(2, 2) - q) + 2.0 * p1;
  const double p = std::sqrt(p2 / 6.0);
  const Eigen::Matrix3d b = (a - q * Eigen::Matrix3d::Identity()) / p;
  double r = b.determinant() / 2.0;
  r = std::clamp(r, -1.0, 1.0);
  const double phi = std::acos(r) / 3.0;
  const double e1 = q + 2.0 * p * std::cos(phi);
  const double e3 = q + 2.0 * p * std::cos(phi + 2.0 * kPi / 3.0);
  const double e2 = 3.0 * q - e1 - e3;
  return {e1, e2, e3};
}

/// Matrix exponential of a 3x3 via plain Taylor series (test oracle).
inline Eigen::Matrix3d expm_oracle(const Eigen::Matrix3d& m) {
  Eigen::Matrix3d sum = Eigen::Matrix3d::Identity();
  Eigen::Matrix3d term = Eigen::Matrix3d::Identity();
  for (int k = 1; k <= 40; ++k) {
    term = term * m / static_cast<double>(k);
    sum += term;
  }
  return sum;
}

}  // namespace loam::testsup

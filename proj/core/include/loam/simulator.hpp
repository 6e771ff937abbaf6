#pragma once

#include <optional>
#include <string>
#include <vector>

#include "loam/types.hpp"

namespace loam {
namespace sim {

/// Two counter-rotating deflection model producing a rosette, non-repeating
/// scan pattern within a conical FoV.
struct RosetteParams {
  double prism_rate1 = 7294.0 / 60.0;   // rev/s
  double prism_rate2 = -4664.0 / 60.0;  // rev/s, counter-rotating
  double deflection1 = 0.12;            // rad
  double deflection2 = 0.215;           // rad
  double point_rate = 100000.0;         // points/s
  double fov_half_deg = 19.2;
  double max_range = 90.0;  // m
};

struct Primitive {
  enum class Type { Rect, Box, Sphere };
  Type type = Type::Rect;

  // Rect: finite plane patch
  Eigen::Vector3d center{0, 0, 0};
  Eigen::Vector3d normal{1, 0, 0};  // unit
  Eigen::Vector3d u_axis{0, 1, 0};  // unit, in-plane; v = normal x u
  double half_u = 1.0;
  double half_v = 1.0;

  // Box: axis-aligned half extents; Sphere: radius
  Eigen::Vector3d half_extents{1, 1, 1};
  double radius = 1.0;

  double reflectivity = 1.0;
  Eigen::Vector3d velocity{0, 0, 0};  // m/s, dynamic primitives

  Eigen::Vector3d center_at(double t) const { return center + t * velocity; }
};

struct Scene {
  std::vector<Primitive> primitives;
};

/// Per-channel motion: polynomial in t plus optional sinusoidal terms.
struct Channel {
  std::vector<double> poly;  // c0 + c1 t + c2 t^2 + ...
  struct Sinusoid {
    double amplitude = 0.0;
    double frequency_hz = 0.0;
    double phase = 0.0;
  };
  std::vector<Sinusoid> sinusoids;

  double eval(double t) const;
};

/// Continuous ground-truth trajectory: position channels x,y,z plus
/// Z-Y-X Euler angle channels (radians).
struct Trajectory {
  Channel px, py, pz;
  Channel roll, pitch, yaw;

  Pose pose(double t) const;
};

/// Body-frame laser direction at time t: X-forward deflected by the vector
/// sum of the two rotating deflections on the (Y, Z) image plane.
Eigen::Vector3d ray_direction(double t, const RosetteParams& params);

struct RayHit {
  Eigen::Vector3d point;  // world
  double range = 0.0;
  float reflectivity = 0.f;
};

/// Nearest intersection among all primitives (dynamic ones evaluated at t).
std::optional<RayHit> raycast(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                              const Scene& scene, double t, double max_range);

struct SimulatedSequence {
  std::vector<Frame> frames;
  std::vector<Pose> frame_end_poses;              // truth at each frame end
  std::vector<std::vector<Pose>> point_poses;     // truth per point (optional)
};

/// Samples the scene at the point rate along the trajectory. Each point is
/// expressed in the body frame of its own sample time, which is what creates
/// motion blur for the pipeline to remove. Range noise is zero-mean Gaussian
/// with per-frame RNG streams derived from `seed`.
SimulatedSequence generate(const Trajectory& traj, const Scene& scene,
                           const RosetteParams& params, double duration,
                           double sigma_range, std::uint64_t seed,
                           double frame_rate = 20.0, bool keep_point_poses = false);

/// Everything a scene description file specifies.
struct SceneSpec {
  Scene scene;
  Trajectory trajectory;
  RosetteParams params;
  double duration = 1.0;
  double sigma_range = 0.02;
  double frame_rate = 20.0;
  std::uint64_t seed = 1;
};

/// Parses the plain-text scene schema (see README). Throws
/// std::runtime_error naming the offending line.
SceneSpec load_scene(const std::string& path);

}  // namespace sim
}  // namespace loam

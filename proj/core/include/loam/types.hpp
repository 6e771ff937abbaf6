#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace loam {

/// One LiDAR return in the sensor (body) frame, X-forward / Y-left / Z-up.
struct RawPoint {
  Eigen::Vector3d position{0, 0, 0};  // meters
  float reflectivity = 0.f;           // unitless, >= 0
  float t_offset = 0.f;               // seconds since frame start
  std::uint32_t seq = 0;              // ordinal index within the frame
};

/// Rigid body pose of the sensor in the world frame at a stamped instant.
/// Stored as a unit quaternion for composition stability; the contract is
/// the rotation matrix.
struct Pose {
  Eigen::Quaterniond orientation{1, 0, 0, 0};
  Eigen::Vector3d translation{0, 0, 0};
  double stamp = 0.0;

  Eigen::Matrix3d rotation() const { return orientation.toRotationMatrix(); }

  static Pose Identity(double stamp = 0.0) {
    Pose p;
    p.stamp = stamp;
    return p;
  }
};

inline Pose compose(const Pose& a, const Pose& b) {
  Pose out;
  out.orientation = (a.orientation * b.orientation).normalized();
  out.translation = a.orientation * b.translation + a.translation;
  out.stamp = b.stamp;
  return out;
}

inline Pose inverse(const Pose& p) {
  Pose out;
  out.orientation = p.orientation.conjugate().normalized();
  out.translation = -(out.orientation * p.translation);
  out.stamp = p.stamp;
  return out;
}

inline Eigen::Vector3d transform_point(const Pose& p, const Eigen::Vector3d& x) {
  return p.orientation * x + p.translation;
}

/// Time-ordered slice of raw points covering one acquisition period.
struct Frame {
  std::vector<RawPoint> points;
  std::uint64_t index = 0;
  double t_start = 0.0;  // seconds, absolute
  double t_end = 0.0;

  double duration() const { return t_end - t_start; }
};

enum class CompensationMode { None, Interpolate, Piecewise };

struct OptimizerOptions {
  int max_outer_iterations = 30;
  int warmup_iterations = 2;
  int max_inner_iterations = 8;
  double trim_fraction = 0.20;
  double rotation_eps = 1e-6;     // rad, convergence threshold on increment
  double translation_eps = 1e-4;  // m
  double damping_init = 1e-4;
  double damping_increase = 10.0;
  double damping_decrease = 0.5;
  int max_damping_retries = 5;
  // trust-region style caps: steps larger than this are rejected and retried
  // with more damping, so a near-singular normal matrix cannot fling the
  // pose along a weakly constrained direction
  double max_step_rotation = 0.3;    // rad
  double max_step_translation = 1.0;  // m
  int min_correspondences = 10;
  // a neighbor set whose farthest member lies beyond this radius from the
  // query is too diffuse to describe a local line/plane; 0 disables the gate
  double max_correspondence_distance = 1.0;  // m
  double edge_weight = 1.0;
  double plane_weight = 1.0;
};

/// All pipeline thresholds. Defaults reproduce the MID40-class values.
struct PipelineConfig {
  // point selection
  double min_depth = 0.1;            // m, below this a return is invalid
  double fringe_angle_deg = 17.0;    // reject deflection >= this
  double intensity_low = 7e-3;
  double intensity_high = 1e-1;
  double incident_low_deg = 5.0;
  double incident_high_deg = 175.0;
  double hidden_factor = 0.1;
  double neighbor_depth_jump = 0.5;  // m, neighbors on different objects

  // feature extraction
  int smoothness_half_window = 5;
  double c_edge = 0.05;
  double c_plane = 0.005;
  int sectors = 12;
  int max_edge_per_sector = 2;
  int max_plane_per_sector = 4;
  double reflectivity_ratio = 0.5;
  int reflectivity_half_window = 5;
  int reflectivity_min_run = 2;
  double reflectivity_eps = 1e-3;
  int segment_seq_gap = 3;
  double segment_dist_gap = 0.5;  // m

  // motion compensation
  CompensationMode mode = CompensationMode::None;
  int subframes = 3;
  bool combined_interpolation = false;  // interpolate inside sub-frames too

  // map
  double edge_voxel_size = 0.2;   // m
  double plane_voxel_size = 0.4;  // m
  int max_points_per_voxel = 1;

  // pipeline
  double frame_rate = 20.0;  // Hz
  int threads = 1;
  bool constant_velocity_init = false;
  std::uint64_t seed = 0;

  OptimizerOptions optimizer;

  /// Throws std::invalid_argument if any threshold is outside its legal range.
  void validate() const;
};

inline void PipelineConfig::validate() const {
  auto fail = [](const std::string& what) { throw std::invalid_argument("config: " + what); };
  if (min_depth < 0) fail("min_depth must be >= 0");
  if (fringe_angle_deg <= 0 || fringe_angle_deg > 90) fail("fringe_angle_deg out of (0, 90]");
  if (intensity_low < 0 || intensity_high <= intensity_low) fail("intensity window invalid");
  if (incident_low_deg < 0 || incident_high_deg > 180 || incident_high_deg <= incident_low_deg)
    fail("incident window invalid");
  if (hidden_factor <= 0) fail("hidden_factor must be > 0");
  if (smoothness_half_window < 1) fail("smoothness_half_window must be >= 1");
  if (c_edge <= c_plane) fail("c_edge must exceed c_plane");
  if (sectors < 1) fail("sectors must be >= 1");
  if (max_edge_per_sector < 0 || max_plane_per_sector < 0) fail("sector caps must be >= 0");
  if (reflectivity_ratio <= 0) fail("reflectivity_ratio must be > 0");
  if (reflectivity_min_run < 1) fail("reflectivity_min_run must be >= 1");
  if (subframes < 1) fail("subframes must be >= 1");
  if (edge_voxel_size <= 0 || plane_voxel_size <= 0) fail("voxel sizes must be > 0");
  if (max_points_per_voxel < 1) fail("max_points_per_voxel must be >= 1");
  if (frame_rate <= 0) fail("frame_rate must be > 0");
  if (threads < 1) fail("threads must be >= 1");
  if (optimizer.trim_fraction < 0 || optimizer.trim_fraction >= 0.5)
    fail("trim_fraction out of [0, 0.5)");
  if (optimizer.rotation_eps <= 0 || optimizer.translation_eps <= 0)
    fail("convergence thresholds must be > 0");
  if (optimizer.max_outer_iterations < 1) fail("max_outer_iterations must be >= 1");
}

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double d) { return d * kPi / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / kPi; }

inline Eigen::Matrix3d hat(const Eigen::Vector3d& v) {
  Eigen::Matrix3d m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

}  // namespace loam

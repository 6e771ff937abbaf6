#pragma once

#include <vector>

#include "loam/types.hpp"

namespace loam {

/// Contiguous slice of a frame's points. Sub-frames of one frame are
/// disjoint, cover it, and differ in size by at most one point.
struct SubFrame {
  std::size_t begin = 0;  // index range into the frame's points
  std::size_t end = 0;
  int sub_index = 0;
  double t_start = 0.0;  // absolute seconds of the first/last point in the slice
  double t_end = 0.0;

  std::size_t size() const { return end - begin; }
};

std::vector<SubFrame> split_subframes(const Frame& frame, int n);

/// Relative motion between two stamped poses, in axis-angle form, with the
/// skew matrices cached so per-point interpolation only needs sin/cos.
struct InterpolationSpec {
  Eigen::Vector3d axis = Eigen::Vector3d::UnitX();  // unit rotation axis
  double angle = 0.0;                               // rad, in [0, pi]
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();  // relative, prev body frame
  double t_begin = 0.0;
  double t_end = 0.0;

  Eigen::Matrix3d axis_hat = Eigen::Matrix3d::Zero();
  Eigen::Matrix3d axis_hat2 = Eigen::Matrix3d::Zero();

  static InterpolationSpec Between(const Pose& prev, const Pose& cur);

  /// Rodrigues rotation for interpolation fraction s in [0, 1]:
  ///   R(s) = I + w^ sin(s*theta) + (w^)^2 (1 - cos(s*theta))
  Eigen::Matrix3d relative_rotation(double s) const;
  Eigen::Vector3d relative_translation(double s) const { return s * translation; }

  double fraction(double t) const {
    const double span = t_end - t_begin;
    return span > 0 ? (t - t_begin) / span : 1.0;
  }
};

/// Linearly interpolated pose at time t in [prev.stamp, cur.stamp];
/// exact at both endpoints.
Pose interpolate_pose(const Pose& prev, const Pose& cur, double t);

/// Projects a raw point to the world via the interpolated pose at its own
/// sample time (t_begin + t_offset).
Eigen::Vector3d deskew_project(const RawPoint& p, const InterpolationSpec& spec,
                               const Pose& prev);

}  // namespace loam

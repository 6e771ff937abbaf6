#include "loam/motion_compensation.hpp"

#include <algorithm>
#include <cmath>

namespace loam {

std::vector<SubFrame> split_subframes(const Frame& frame, int n) {
  std::vector<SubFrame> out;
  const std::size_t total = frame.points.size();
  if (total == 0 || n < 1) return out;
  const std::size_t slices = std::min<std::size_t>(n, total);
  const std::size_t base = total / slices;
  const std::size_t extra = total % slices;

  std::size_t begin = 0;
  for (std::size_t i = 0; i < slices; ++i) {
    SubFrame sf;
    sf.begin = begin;
    sf.end = begin + base + (i < extra ? 1 : 0);
    sf.sub_index = static_cast<int>(i);
    sf.t_start = frame.t_start + frame.points[sf.begin].t_offset;
    sf.t_end = frame.t_start + frame.points[sf.end - 1].t_offset;
    begin = sf.end;
    out.push_back(sf);
  }
  return out;
}

InterpolationSpec InterpolationSpec::Between(const Pose& prev, const Pose& cur) {
  InterpolationSpec spec;
  spec.t_begin = prev.stamp;
  spec.t_end = cur.stamp;
  const Eigen::Quaterniond rel_q = (prev.orientation.conjugate() * cur.orientation).normalized();
  const Eigen::AngleAxisd aa(rel_q);
  spec.angle = aa.angle();
  // AngleAxis may report angles in (pi, 2*pi); fold back to [0, pi].
  if (spec.angle > kPi) {
    spec.angle = 2.0 * kPi - spec.angle;
    spec.axis = -aa.axis();
  } else {
    spec.axis = aa.axis();
  }
  spec.translation = prev.orientation.conjugate() * (cur.translation - prev.translation);
  spec.axis_hat = hat(spec.axis);
  spec.axis_hat2 = spec.axis_hat * spec.axis_hat;
  return spec;
}

Eigen::Matrix3d InterpolationSpec::relative_rotation(double s) const {
  const double st = s * angle;
  return Eigen::Matrix3d::Identity() + axis_hat * std::sin(st) +
         axis_hat2 * (1.0 - std::cos(st));
}

Pose interpolate_pose(const Pose& prev, const Pose& cur, double t) {
  const InterpolationSpec spec = InterpolationSpec::Between(prev, cur);
  const double s = spec.fraction(t);
  Pose out;
  out.orientation =
      (prev.orientation * Eigen::Quaterniond(spec.relative_rotation(s))).normalized();
  out.translation = prev.orientation * spec.relative_translation(s) + prev.translation;
  out.stamp = t;
  return out;
}

Eigen::Vector3d deskew_project(const RawPoint& p, const InterpolationSpec& spec,
                               const Pose& prev) {
  const double s = spec.fraction(spec.t_begin + p.t_offset);
  const Eigen::Vector3d body =
      spec.relative_rotation(s) * p.position + spec.relative_translation(s);
  return prev.orientation * body + prev.translation;
}

}  // namespace loam

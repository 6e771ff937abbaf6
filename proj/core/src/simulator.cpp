#include "loam/simulator.hpp"

#include <cmath>
#include <limits>
#include <random>

namespace loam {
namespace sim {

double Channel::eval(double t) const {
  double v = 0.0;
  double tn = 1.0;
  for (const double c : poly) {
    v += c * tn;
    tn *= t;
  }
  for (const Sinusoid& s : sinusoids)
    v += s.amplitude * std::sin(2.0 * kPi * s.frequency_hz * t + s.phase);
  return v;
}

Pose Trajectory::pose(double t) const {
  Pose p;
  p.stamp = t;
  p.translation = {px.eval(t), py.eval(t), pz.eval(t)};
  p.orientation = Eigen::AngleAxisd(yaw.eval(t), Eigen::Vector3d::UnitZ()) *
                  Eigen::AngleAxisd(pitch.eval(t), Eigen::Vector3d::UnitY()) *
                  Eigen::AngleAxisd(roll.eval(t), Eigen::Vector3d::UnitX());
  p.orientation.normalize();
  return p;
}

Eigen::Vector3d ray_direction(double t, const RosetteParams& params) {
  const double a1 = 2.0 * kPi * params.prism_rate1 * t;
  const double a2 = 2.0 * kPi * params.prism_rate2 * t;
  const Eigen::Vector2d u = params.deflection1 * Eigen::Vector2d(std::cos(a1), std::sin(a1)) +
                            params.deflection2 * Eigen::Vector2d(std::cos(a2), std::sin(a2));
  const double alpha = u.norm();  // angular deflection off the X axis
  if (alpha < 1e-12) return Eigen::Vector3d::UnitX();
  const Eigen::Vector2d dir_yz = u / alpha;
  return {std::cos(alpha), std::sin(alpha) * dir_yz.x(), std::sin(alpha) * dir_yz.y()};
}

namespace {

std::optional<double> intersect_rect(const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                                     const Primitive& prim, double t) {
  const Eigen::Vector3d c = prim.center_at(t);
  const double denom = d.dot(prim.normal);
  if (std::abs(denom) < 1e-12) return std::nullopt;
  const double s = (c - o).dot(prim.normal) / denom;
  if (s <= 1e-9) return std::nullopt;
  const Eigen::Vector3d hit = o + s * d - c;
  const Eigen::Vector3d v_axis = prim.normal.cross(prim.u_axis);
  if (std::abs(hit.dot(prim.u_axis)) > prim.half_u) return std::nullopt;
  if (std::abs(hit.dot(v_axis)) > prim.half_v) return std::nullopt;
  return s;
}

std::optional<double> intersect_box(const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                                    const Primitive& prim, double t) {
  const Eigen::Vector3d c = prim.center_at(t);
  const Eigen::Vector3d lo = c - prim.half_extents;
  const Eigen::Vector3d hi = c + prim.half_extents;
  double t_near = -std::numeric_limits<double>::infinity();
  double t_far = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (std::abs(d[a]) < 1e-12) {
      if (o[a] < lo[a] || o[a] > hi[a]) return std::nullopt;
      continue;
    }
    double t0 = (lo[a] - o[a]) / d[a];
    double t1 = (hi[a] - o[a]) / d[a];
    if (t0 > t1) std::swap(t0, t1);
    t_near = std::max(t_near, t0);
    t_far = std::min(t_far, t1);
    if (t_near > t_far) return std::nullopt;
  }
  if (t_far <= 1e-9) return std::nullopt;
  return t_near > 1e-9 ? t_near : t_far;
}

std::optional<double> intersect_sphere(const Eigen::Vector3d& o, const Eigen::Vector3d& d,
                                       const Primitive& prim, double t) {
  const Eigen::Vector3d oc = o - prim.center_at(t);
  const double b = oc.dot(d);
  const double c = oc.squaredNorm() - prim.radius * prim.radius;
  const double disc = b * b - c;
  if (disc < 0) return std::nullopt;
  const double sq = std::sqrt(disc);
  const double s0 = -b - sq;
  if (s0 > 1e-9) return s0;
  const double s1 = -b + sq;
  if (s1 > 1e-9) return s1;
  return std::nullopt;
}

}  // namespace

std::optional<RayHit> raycast(const Eigen::Vector3d& origin, const Eigen::Vector3d& dir,
                              const Scene& scene, double t, double max_range) {
  std::optional<RayHit> best;
  for (const Primitive& prim : scene.primitives) {
    std::optional<double> s;
    switch (prim.type) {
      case Primitive::Type::Rect: s = intersect_rect(origin, dir, prim, t); break;
      case Primitive::Type::Box: s = intersect_box(origin, dir, prim, t); break;
      case Primitive::Type::Sphere: s = intersect_sphere(origin, dir, prim, t); break;
    }
    if (!s || *s > max_range) continue;
    if (!best || *s < best->range) {
      RayHit hit;
      hit.range = *s;
      hit.point = origin + *s * dir;
      hit.reflectivity = static_cast<float>(prim.reflectivity);
      best = hit;
    }
  }
  return best;
}

SimulatedSequence generate(const Trajectory& traj, const Scene& scene,
                           const RosetteParams& params, double duration,
                           double sigma_range, std::uint64_t seed, double frame_rate,
                           bool keep_point_poses) {
  SimulatedSequence out;
  const double frame_dt = 1.0 / frame_rate;
  const double point_dt = 1.0 / params.point_rate;
  const std::size_t n_frames = static_cast<std::size_t>(std::round(duration * frame_rate));
  const std::size_t pts_per_frame = static_cast<std::size_t>(std::round(frame_dt / point_dt));

  out.frames.reserve(n_frames);
  for (std::size_t fi = 0; fi < n_frames; ++fi) {
    Frame frame;
    frame.index = fi;
    frame.t_start = fi * frame_dt;
    frame.t_end = frame.t_start + frame_dt;

    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + fi);
    std::normal_distribution<double> noise(0.0, sigma_range);

    std::vector<Pose> poses;
    std::uint32_t seq = 0;
    for (std::size_t pi = 0; pi < pts_per_frame; ++pi) {
      const double t = frame.t_start + pi * point_dt;
      const Pose pose = traj.pose(t);
      const Eigen::Vector3d dir_body = ray_direction(t, params);
      const Eigen::Vector3d dir_world = pose.orientation * dir_body;
      const auto hit = raycast(pose.translation, dir_world, scene, t, params.max_range);
      ++seq;  // seq tracks the sample slot so misses leave gaps in scan order
      if (!hit) continue;
      double range = hit->range;
      if (sigma_range > 0) range = std::max(0.0, range + noise(rng));
      RawPoint p;
      p.position = range * dir_body;
      p.reflectivity = hit->reflectivity;
      p.t_offset = static_cast<float>(t - frame.t_start);
      p.seq = seq - 1;
      frame.points.push_back(p);
      if (keep_point_poses) poses.push_back(pose);
    }
    out.frame_end_poses.push_back(traj.pose(frame.t_end));
    if (keep_point_poses) out.point_poses.push_back(std::move(poses));
    out.frames.push_back(std::move(frame));
  }
  return out;
}

}  // namespace sim
}  // namespace loam

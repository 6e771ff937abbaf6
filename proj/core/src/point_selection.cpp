#include "loam/point_selection.hpp"

#include <algorithm>
#include <cmath>

namespace loam {

PointAttributes compute_attributes(const RawPoint& p, const RawPoint* prev,
                                   const RawPoint* next, const PipelineConfig& cfg) {
  PointAttributes a;
  const Eigen::Vector3d& x = p.position;
  a.depth = x.norm();
  const double lateral = std::sqrt(x.y() * x.y() + x.z() * x.z());
  a.deflection = std::atan2(lateral, std::abs(x.x()));
  if (a.depth > 0) a.intensity = p.reflectivity / (a.depth * a.depth);

  if (prev != nullptr && next != nullptr) {
    const double d_prev = prev->position.norm();
    const double d_next = next->position.norm();
    const bool same_object = std::abs(d_prev - a.depth) <= cfg.neighbor_depth_jump &&
                             std::abs(d_next - a.depth) <= cfg.neighbor_depth_jump;
    const Eigen::Vector3d chord = prev->position - next->position;
    const double chord_len = chord.norm();
    if (same_object && chord_len >= 1e-6 && a.depth > 0) {
      const double c = chord.dot(x) / (chord_len * a.depth);
      a.incident = std::acos(std::clamp(c, -1.0, 1.0));
    }
  }
  if (prev != nullptr) a.hidden = is_hidden(p, *prev, cfg.hidden_factor);
  return a;
}

bool is_hidden(const RawPoint& p_e, const RawPoint& p_d, double factor) {
  const double de = p_e.position.norm();
  const double dd = p_d.position.norm();
  return (p_e.position - p_d.position).norm() >= factor * de && de > dd;
}

AttributedFrame compute_frame_attributes(const Frame& frame, const PipelineConfig& cfg) {
  AttributedFrame out;
  out.points.reserve(frame.points.size());
  const auto n = frame.points.size();
  for (std::size_t i = 0; i < n; ++i) {
    const RawPoint& p = frame.points[i];
    if (p.position.norm() < cfg.min_depth) {
      ++out.invalid_count;
      continue;
    }
    const RawPoint* prev = (i > 0 && frame.points[i - 1].seq + 1 == p.seq)
                               ? &frame.points[i - 1]
                               : nullptr;
    const RawPoint* next = (i + 1 < n && frame.points[i + 1].seq == p.seq + 1)
                               ? &frame.points[i + 1]
                               : nullptr;
    out.points.push_back({p, compute_attributes(p, prev, next, cfg), i});
  }
  return out;
}

std::pair<std::vector<SelectedPoint>, SelectionReport> filter_points(
    const AttributedFrame& attributed, const PipelineConfig& cfg) {
  std::vector<SelectedPoint> kept;
  SelectionReport report;
  report.rejected_invalid = attributed.invalid_count;

  const double fringe = deg2rad(cfg.fringe_angle_deg);
  const double inc_low = deg2rad(cfg.incident_low_deg);
  const double inc_high = deg2rad(cfg.incident_high_deg);

  for (const SelectedPoint& sp : attributed.points) {
    const PointAttributes& a = sp.attributes;
    if (a.deflection >= fringe) {
      ++report.rejected_fringe;
    } else if (a.intensity <= cfg.intensity_low || a.intensity >= cfg.intensity_high) {
      ++report.rejected_intensity;
    } else if (a.incident && (*a.incident <= inc_low || *a.incident >= inc_high)) {
      ++report.rejected_incident;
    } else if (a.hidden) {
      ++report.rejected_hidden;
    } else {
      report.kept_indices.push_back(sp.source_index);
      kept.push_back(sp);
    }
  }
  report.kept = kept.size();
  return {std::move(kept), report};
}

std::pair<std::vector<SelectedPoint>, SelectionReport> select_points(
    const Frame& frame, const PipelineConfig& cfg) {
  return filter_points(compute_frame_attributes(frame, cfg), cfg);
}

}  // namespace loam

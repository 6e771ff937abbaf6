#include "loam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>

namespace loam {

namespace {

constexpr double kAlignWindow = 0.010;  // s

// Pairs of (estimate index, truth index) matched by nearest stamp.
std::vector<std::pair<std::size_t, std::size_t>> align(const std::vector<Pose>& est,
                                                       const std::vector<Pose>& truth) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::size_t j = 0;
  for (std::size_t i = 0; i < est.size(); ++i) {
    while (j + 1 < truth.size() &&
           std::abs(truth[j + 1].stamp - est[i].stamp) <= std::abs(truth[j].stamp - est[i].stamp))
      ++j;
    if (j < truth.size() && std::abs(truth[j].stamp - est[i].stamp) <= kAlignWindow)
      pairs.emplace_back(i, j);
  }
  return pairs;
}

double arc_length(const std::vector<Pose>& poses, std::size_t begin, std::size_t end) {
  double len = 0.0;
  for (std::size_t i = begin + 1; i <= end; ++i)
    len += (poses[i].translation - poses[i - 1].translation).norm();
  return len;
}

TimingPercentiles percentiles(std::vector<double> values) {
  TimingPercentiles out;
  if (values.empty()) return out;
  std::sort(values.begin(), values.end());
  out.p50 = values[values.size() / 2];
  out.p90 = values[std::min(values.size() - 1, values.size() * 9 / 10)];
  out.max = values.back();
  return out;
}

}  // namespace

double distance_error_percent(const std::vector<Pose>& estimate,
                              const std::vector<Pose>& truth) {
  const auto pairs = align(estimate, truth);
  if (pairs.size() < 2)
    throw std::runtime_error("distance_error_percent: fewer than 2 aligned poses");
  const double est_len = arc_length(estimate, pairs.front().first, pairs.back().first);
  const double true_len = arc_length(truth, pairs.front().second, pairs.back().second);
  if (true_len <= 0)
    throw std::runtime_error("distance_error_percent: zero ground-truth length");
  return std::abs(est_len - true_len) / true_len * 100.0;
}

EulerError euler_error(const std::vector<Pose>& estimate, const std::vector<Pose>& truth) {
  EulerError out;
  Eigen::Vector3d sum = Eigen::Vector3d::Zero();
  for (const auto& [ei, ti] : align(estimate, truth)) {
    const Eigen::Matrix3d rel =
        truth[ti].rotation().transpose() * estimate[ei].rotation();
    // Z-Y-X (yaw-pitch-roll) decomposition
    const double pitch = std::asin(std::clamp(-rel(2, 0), -1.0, 1.0));
    if (std::abs(pitch) > deg2rad(89.0)) {
      ++out.excluded_gimbal;
      continue;
    }
    const double roll = std::atan2(rel(2, 1), rel(2, 2));
    const double yaw = std::atan2(rel(1, 0), rel(0, 0));
    const Eigen::Vector3d err(std::abs(rad2deg(roll)), std::abs(rad2deg(pitch)),
                              std::abs(rad2deg(yaw)));
    sum += err;
    out.max_deg = out.max_deg.cwiseMax(err);
    ++out.aligned;
  }
  if (out.aligned > 0) out.mean_deg = sum / static_cast<double>(out.aligned);
  return out;
}

std::vector<PlaneThickness> plane_thickness_rms(const std::vector<Eigen::Vector3d>& points,
                                                const std::vector<TruthPlane>& planes,
                                                double assign_radius,
                                                std::size_t min_points) {
  std::vector<double> sq_sum(planes.size(), 0.0);
  std::vector<std::size_t> count(planes.size(), 0);

  for (const Eigen::Vector3d& p : points) {
    double best_dist = assign_radius;
    int best = -1;
    for (std::size_t k = 0; k < planes.size(); ++k) {
      const TruthPlane& pl = planes[k];
      const Eigen::Vector3d rel = p - pl.center;
      const Eigen::Vector3d v_axis = pl.normal.cross(pl.u_axis);
      // distance to the finite patch: clamp in-plane coordinates
      const double du = std::clamp(rel.dot(pl.u_axis), -pl.half_u, pl.half_u);
      const double dv = std::clamp(rel.dot(v_axis), -pl.half_v, pl.half_v);
      const Eigen::Vector3d closest = pl.center + du * pl.u_axis + dv * v_axis;
      const double patch_dist = (p - closest).norm();
      if (patch_dist <= best_dist) {
        best_dist = patch_dist;
        best = static_cast<int>(k);
      }
    }
    if (best >= 0) {
      const double dn = (p - planes[best].center).dot(planes[best].normal);
      sq_sum[best] += dn * dn;
      ++count[best];
    }
  }

  std::vector<PlaneThickness> out(planes.size());
  for (std::size_t k = 0; k < planes.size(); ++k) {
    out[k].assigned = count[k];
    out[k].sufficient = count[k] >= min_points;
    if (count[k] > 0) out[k].rms = std::sqrt(sq_sum[k] / static_cast<double>(count[k]));
  }
  return out;
}

double median_plane_rms(const std::vector<PlaneThickness>& stats) {
  std::vector<double> values;
  for (const PlaneThickness& s : stats)
    if (s.sufficient) values.push_back(s.rms);
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  return values[values.size() / 2];
}

TimingReport timing_report(const std::vector<OdometryRecord>& records) {
  std::map<std::uint64_t, StageTiming> per_frame;
  for (const OdometryRecord& r : records) {
    StageTiming& t = per_frame[r.frame_index];
    t.selection_ms += r.timing.selection_ms;
    t.extraction_ms += r.timing.extraction_ms;
    t.matching_ms += r.timing.matching_ms;
    t.solve_ms += r.timing.solve_ms;
    t.register_ms += r.timing.register_ms;
    t.index_ms += r.timing.index_ms;
    t.total_ms += r.timing.total_ms;
  }
  std::vector<double> total, sel, ext, match, solve, reg, idx;
  for (const auto& [frame, t] : per_frame) {
    total.push_back(t.total_ms);
    sel.push_back(t.selection_ms);
    ext.push_back(t.extraction_ms);
    match.push_back(t.matching_ms);
    solve.push_back(t.solve_ms);
    reg.push_back(t.register_ms);
    idx.push_back(t.index_ms);
  }
  TimingReport report;
  report.frames = per_frame.size();
  report.total = percentiles(total);
  report.selection = percentiles(sel);
  report.extraction = percentiles(ext);
  report.matching = percentiles(match);
  report.solve = percentiles(solve);
  report.registration = percentiles(reg);
  report.index = percentiles(idx);
  return report;
}

void save_timing_report(const std::string& path, const TimingReport& r) {
  std::ofstream out(path);
  auto row = [&](const char* name, const TimingPercentiles& p) {
    out << name << " p50_ms " << p.p50 << " p90_ms " << p.p90 << " max_ms " << p.max << '\n';
  };
  out << "frames " << r.frames << '\n';
  row("total", r.total);
  row("selection", r.selection);
  row("extraction", r.extraction);
  row("matching", r.matching);
  row("solve", r.solve);
  row("register", r.registration);
  row("index", r.index);
}

}  // namespace loam

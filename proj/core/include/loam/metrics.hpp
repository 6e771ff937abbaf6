#pragma once

#include <string>
#include <vector>

#include "loam/pipeline.hpp"
#include "loam/types.hpp"

namespace loam {

/// Relative error (%) between the traveled arc lengths of two trajectories,
/// computed over stamps alignable within 10 ms. Throws std::runtime_error
/// with fewer than 2 aligned poses.
double distance_error_percent(const std::vector<Pose>& estimate,
                              const std::vector<Pose>& truth);

/// Per-axis statistics of the Z-Y-X Euler decomposition of
/// truth^T * estimate over aligned poses. Poses near gimbal lock
/// (|pitch| > 89 deg) are excluded and counted.
struct EulerError {
  Eigen::Vector3d mean_deg = Eigen::Vector3d::Zero();  // roll, pitch, yaw
  Eigen::Vector3d max_deg = Eigen::Vector3d::Zero();
  std::size_t aligned = 0;
  std::size_t excluded_gimbal = 0;
};
EulerError euler_error(const std::vector<Pose>& estimate, const std::vector<Pose>& truth);

/// A labeled ground-truth plane patch from the simulator scene.
struct TruthPlane {
  Eigen::Vector3d center{0, 0, 0};
  Eigen::Vector3d normal{1, 0, 0};  // unit
  Eigen::Vector3d u_axis{0, 1, 0};  // unit, in-plane
  double half_u = 1.0;
  double half_v = 1.0;
};

struct PlaneThickness {
  double rms = 0.0;  // m, point-to-plane distances
  std::size_t assigned = 0;
  bool sufficient = false;  // at least 50 assigned points
};

/// Assigns each map point to the nearest truth patch within 0.3 m and
/// reports the RMS perpendicular distance per plane.
std::vector<PlaneThickness> plane_thickness_rms(const std::vector<Eigen::Vector3d>& points,
                                                const std::vector<TruthPlane>& planes,
                                                double assign_radius = 0.3,
                                                std::size_t min_points = 50);

/// Median of the RMS over planes with sufficient data; NaN when none have.
double median_plane_rms(const std::vector<PlaneThickness>& stats);

struct TimingPercentiles {
  double p50 = 0.0;
  double p90 = 0.0;
  double max = 0.0;
};

struct TimingReport {
  TimingPercentiles total;
  TimingPercentiles selection, extraction, matching, solve, registration, index;
  std::size_t frames = 0;
};

/// Per-frame timing percentiles aggregated over records (sub-frame records
/// of one frame are summed into that frame's totals).
TimingReport timing_report(const std::vector<OdometryRecord>& records);

void save_timing_report(const std::string& path, const TimingReport& report);

}  // namespace loam

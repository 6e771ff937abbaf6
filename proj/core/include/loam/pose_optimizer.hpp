#pragma once

#include <vector>

#include "loam/correspondence.hpp"
#include "loam/feature_extraction.hpp"
#include "loam/kd_tree.hpp"
#include "loam/motion_compensation.hpp"
#include "loam/types.hpp"

namespace loam {

enum class OptimizerStatus { Converged, MaxIterations, Diverged, Degenerate };

struct OptimizationResult {
  Pose pose;
  double final_cost = 0.0;
  std::size_t edge_count = 0;
  std::size_t plane_count = 0;
  std::size_t trimmed = 0;
  bool converged = false;
  int iterations = 0;  // outer iterations used
  OptimizerStatus status = OptimizerStatus::Converged;
  double matching_ms = 0.0;  // correspondence search time
  double solve_ms = 0.0;     // normal-equation time
};

/// Optional per-point deskew inside the optimizer: body points are
/// undistorted via the pose interpolated between `prev_pose` and
/// `predicted_end` (a constant-velocity extrapolation) at each point's
/// sample time, then re-expressed in the unit-end body frame. The
/// interpolation endpoints stay fixed while the unit-end pose is optimized;
/// tying the endpoint to the live estimate instead feeds estimation error
/// straight back into the next deskew and destabilizes the odometry loop.
struct DeskewContext {
  bool enabled = false;
  Pose prev_pose;
  Pose predicted_end;          // predicted pose at the frame end (stamp = frame t_end)
  double frame_t_start = 0.0;  // absolute time feature t_offsets are relative to
  double unit_t_end = 0.0;     // absolute time of the unit's last point
};

struct PoseIncrement {
  Eigen::Vector3d rotation = Eigen::Vector3d::Zero();     // axis-angle, rad
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();  // m

  double rotation_norm() const { return rotation.norm(); }
  double translation_norm() const { return translation.norm(); }
};

/// Residual of a correspondence re-evaluated at `pose` (anchors fixed).
double evaluate_residual(const Correspondence& c, const Pose& pose);

/// Analytic 1x6 Jacobian of the residual wrt a left-multiplicative
/// axis-angle rotation increment (first 3) and additive translation (last 3).
Eigen::Matrix<double, 1, 6> residual_jacobian(const Correspondence& c, const Pose& pose);

/// One damped Gauss-Newton step on cost 0.5 * sum r_i^2. Throws nothing;
/// `ok` is false when the normal equations were not solvable.
struct SolveStepResult {
  PoseIncrement increment;
  bool ok = false;
};
SolveStepResult solve_step(const std::vector<Correspondence>& correspondences,
                           const Pose& current, double damping,
                           const OptimizerOptions& opts = {});

/// One matching pass: project every feature with `pose` (deskewing first
/// when the context is enabled), look up its 5 nearest map neighbors, and
/// keep the sets that validate as a local line (edges) or plane (planes)
/// within the correspondence distance gate.
std::vector<Correspondence> find_correspondences(const FeatureCloud& features,
                                                 const KdTree& map_edges,
                                                 const KdTree& map_planes, const Pose& pose,
                                                 const DeskewContext& deskew,
                                                 const OptimizerOptions& opts = {});

/// Drops ceil(fraction * N) correspondences with the largest |residual|;
/// ties resolve by stable input order.
std::vector<Correspondence> trim_outliers(std::vector<Correspondence> correspondences,
                                          double fraction);

/// Iterative scan-to-map pose estimation: every outer iteration re-finds the
/// 5 nearest map neighbors of each projected feature, validates them as
/// line/plane, runs a short warm-up solve, trims the largest residuals, and
/// solves to convergence.
OptimizationResult optimize(const FeatureCloud& features, const KdTree& map_edges,
                            const KdTree& map_planes, const Pose& init,
                            const OptimizerOptions& opts,
                            const DeskewContext& deskew = {});

}  // namespace loam

#include "loam/pose_optimizer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

namespace loam {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

Pose apply_increment(const Pose& pose, const PoseIncrement& inc) {
  Pose out = pose;
  const double angle = inc.rotation.norm();
  if (angle > 0) {
    const Eigen::Quaterniond dq(Eigen::AngleAxisd(angle, inc.rotation / angle));
    out.orientation = (dq * pose.orientation).normalized();
  }
  out.translation += inc.translation;
  return out;
}

double weight_of(const Correspondence& c, const OptimizerOptions& opts) {
  return c.kind == FeatureKind::Edge ? opts.edge_weight : opts.plane_weight;
}

double total_cost(const std::vector<Correspondence>& corrs, const Pose& pose,
                  const OptimizerOptions& opts) {
  double cost = 0.0;
  for (const Correspondence& c : corrs) {
    const double r = evaluate_residual(c, pose);
    cost += 0.5 * weight_of(c, opts) * r * r;
  }
  return cost;
}

struct LmState {
  double damping;
  int consecutive_failures = 0;
  bool last_increment_small = false;
  bool solvable = true;
};

// Runs up to `iterations` damped Gauss-Newton steps, accepting a step only
// if it does not increase the cost. Returns false on divergence (three
// consecutive iterations without an acceptable step).
bool lm_iterations(const std::vector<Correspondence>& corrs, Pose& pose, int iterations,
                   bool stop_on_convergence, const OptimizerOptions& opts, LmState& state,
                   double& solve_ms) {
  for (int it = 0; it < iterations; ++it) {
    const double cost0 = total_cost(corrs, pose, opts);
    double damping = state.damping;
    bool accepted = false;
    PoseIncrement taken;
    for (int attempt = 0; attempt <= opts.max_damping_retries; ++attempt) {
      const auto t0 = Clock::now();
      const SolveStepResult step = solve_step(corrs, pose, damping, opts);
      solve_ms += ms_since(t0);
      if (!step.ok) {
        damping *= opts.damping_increase;
        if (attempt == opts.max_damping_retries) state.solvable = false;
        continue;
      }
      if (step.increment.rotation_norm() > opts.max_step_rotation ||
          step.increment.translation_norm() > opts.max_step_translation) {
        damping *= opts.damping_increase;
        continue;
      }
      const bool tiny = step.increment.rotation_norm() < opts.rotation_eps &&
                        step.increment.translation_norm() < opts.translation_eps;
      const Pose candidate = apply_increment(pose, step.increment);
      if (total_cost(corrs, candidate, opts) <= cost0) {
        pose = candidate;
        taken = step.increment;
        state.damping = std::max(damping * opts.damping_decrease, 1e-9);
        accepted = true;
        break;
      }
      if (tiny) {
        // a sub-threshold step that cannot lower the cost means we are at
        // the optimum up to numerical noise
        state.consecutive_failures = 0;
        state.last_increment_small = true;
        return true;
      }
      damping *= opts.damping_increase;
    }
    if (!state.solvable) return false;
    if (!accepted) {
      if (++state.consecutive_failures >= 3) return false;
      continue;
    }
    state.consecutive_failures = 0;
    state.last_increment_small = taken.rotation_norm() < opts.rotation_eps &&
                                 taken.translation_norm() < opts.translation_eps;
    if (stop_on_convergence && state.last_increment_small) return true;
  }
  return true;
}

}  // namespace

double evaluate_residual(const Correspondence& c, const Pose& pose) {
  const Eigen::Vector3d p_w = transform_point(pose, c.body_point);
  const auto r = c.kind == FeatureKind::Edge ? edge_residual(p_w, c.neighbors)
                                             : plane_residual(p_w, c.neighbors);
  return r.value_or(0.0);
}

Eigen::Matrix<double, 1, 6> residual_jacobian(const Correspondence& c, const Pose& pose) {
  const Eigen::Vector3d rotated = pose.orientation * c.body_point;
  const Eigen::Vector3d p_w = rotated + pose.translation;

  Eigen::RowVector3d dr_dpw = Eigen::RowVector3d::Zero();
  if (c.kind == FeatureKind::Edge) {
    const Eigen::Vector3d& p1 = c.neighbors.points.front();
    const Eigen::Vector3d& p5 = c.neighbors.points.back();
    const Eigen::Vector3d cross = (p_w - p5).cross(p_w - p1);
    const double cross_norm = cross.norm();
    const double base = (p5 - p1).norm();
    if (cross_norm > 1e-12 && base > 1e-6)
      dr_dpw = (cross / cross_norm).transpose() * hat(p1 - p5) / base;
  } else {
    const Eigen::Vector3d& p1 = c.neighbors.points[0];
    const Eigen::Vector3d& p3 = c.neighbors.points[2];
    const Eigen::Vector3d& p5 = c.neighbors.points[4];
    const Eigen::Vector3d normal = (p3 - p5).cross(p3 - p1);
    const double len = normal.norm();
    if (len > 1e-9) dr_dpw = (normal / len).transpose();
  }

  Eigen::Matrix<double, 1, 6> jac;
  jac.leftCols<3>() = -dr_dpw * hat(rotated);  // left-multiplicative rotation
  jac.rightCols<3>() = dr_dpw;
  return jac;
}

SolveStepResult solve_step(const std::vector<Correspondence>& correspondences,
                           const Pose& current, double damping,
                           const OptimizerOptions& opts) {
  Eigen::Matrix<double, 6, 6> hessian = Eigen::Matrix<double, 6, 6>::Zero();
  Eigen::Matrix<double, 6, 1> gradient = Eigen::Matrix<double, 6, 1>::Zero();
  for (const Correspondence& c : correspondences) {
    const Eigen::Matrix<double, 1, 6> jac = residual_jacobian(c, current);
    const double r = evaluate_residual(c, current);
    const double w = weight_of(c, opts);
    hessian.noalias() += w * jac.transpose() * jac;
    gradient.noalias() += w * jac.transpose() * r;
  }
  hessian.diagonal().array() += damping;

  SolveStepResult out;
  const Eigen::LDLT<Eigen::Matrix<double, 6, 6>> ldlt(hessian);
  if (ldlt.info() != Eigen::Success) return out;
  const Eigen::Matrix<double, 6, 1> delta = ldlt.solve(-gradient);
  if (!delta.allFinite()) return out;
  out.increment.rotation = delta.head<3>();
  out.increment.translation = delta.tail<3>();
  out.ok = true;
  return out;
}

std::vector<Correspondence> trim_outliers(std::vector<Correspondence> correspondences,
                                          double fraction) {
  if (fraction <= 0 || correspondences.empty()) return correspondences;
  const std::size_t drop = static_cast<std::size_t>(
      std::ceil(fraction * static_cast<double>(correspondences.size())));
  std::vector<std::size_t> order(correspondences.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(correspondences[a].residual) > std::abs(correspondences[b].residual);
  });
  std::vector<char> dropped(correspondences.size(), 0);
  for (std::size_t i = 0; i < drop && i < order.size(); ++i) dropped[order[i]] = 1;
  std::vector<Correspondence> kept;
  kept.reserve(correspondences.size() - drop);
  for (std::size_t i = 0; i < correspondences.size(); ++i)
    if (!dropped[i]) kept.push_back(std::move(correspondences[i]));
  return kept;
}

namespace {

void find_kind(const std::vector<FeaturePoint>& features, const KdTree& tree,
               FeatureKind kind, const Pose& pose, const DeskewContext& deskew,
               const InterpolationSpec* spec, const OptimizerOptions& opts,
               std::vector<Correspondence>& out) {
  if (tree.size() < NeighborSet::kSize) return;
  // With deskew, points are undistorted along the predicted in-frame motion
  // and re-expressed in the predicted unit-end body frame; the interpolation
  // endpoints do not move with the estimate being optimized.
  const Pose pred_end_inverse =
      deskew.enabled ? inverse(interpolate_pose(deskew.prev_pose, deskew.predicted_end,
                                                deskew.unit_t_end))
                     : Pose::Identity();
  for (const FeaturePoint& f : features) {
    Eigen::Vector3d body = f.position;
    if (deskew.enabled && spec != nullptr) {
      const double s =
          std::clamp(spec->fraction(deskew.frame_t_start + f.t_offset), 0.0, 1.0);
      const Eigen::Vector3d in_prev =
          spec->relative_rotation(s) * f.position + spec->relative_translation(s);
      body = transform_point(pred_end_inverse,
                             transform_point(deskew.prev_pose, in_prev));
    }
    const Eigen::Vector3d world = transform_point(pose, body);
    const auto hits = tree.knn(world, NeighborSet::kSize);
    if (hits.size() < NeighborSet::kSize) continue;
    if (opts.max_correspondence_distance > 0 &&
        hits.back().distance > opts.max_correspondence_distance)
      continue;
    std::array<Eigen::Vector3d, NeighborSet::kSize> pts;
    for (int i = 0; i < NeighborSet::kSize; ++i) pts[i] = tree.point(hits[i].index);
    const NeighborSet ns = NeighborSet::From(pts);
    std::optional<double> residual;
    if (kind == FeatureKind::Edge && line_valid(ns)) residual = edge_residual(world, ns);
    if (kind == FeatureKind::Plane && plane_valid(ns)) residual = plane_residual(world, ns);
    if (!residual) continue;
    out.push_back({kind, body, world, ns, *residual});
  }
}

}  // namespace

std::vector<Correspondence> find_correspondences(const FeatureCloud& features,
                                                 const KdTree& map_edges,
                                                 const KdTree& map_planes, const Pose& pose,
                                                 const DeskewContext& deskew,
                                                 const OptimizerOptions& opts) {
  std::vector<Correspondence> out;
  out.reserve(features.edges.size() + features.planes.size());
  InterpolationSpec spec;
  const InterpolationSpec* spec_ptr = nullptr;
  if (deskew.enabled) {
    spec = InterpolationSpec::Between(deskew.prev_pose, deskew.predicted_end);
    spec_ptr = &spec;
  }
  find_kind(features.edges, map_edges, FeatureKind::Edge, pose, deskew, spec_ptr, opts,
            out);
  find_kind(features.planes, map_planes, FeatureKind::Plane, pose, deskew, spec_ptr, opts,
            out);
  return out;
}

OptimizationResult optimize(const FeatureCloud& features, const KdTree& map_edges,
                            const KdTree& map_planes, const Pose& init,
                            const OptimizerOptions& opts, const DeskewContext& deskew) {
  OptimizationResult result;
  result.pose = init;

  Pose pose = init;
  LmState lm{opts.damping_init};
  std::vector<Correspondence> corrs;

  for (int outer = 0; outer < opts.max_outer_iterations; ++outer) {
    result.iterations = outer + 1;
    const Pose pose_before = pose;

    const auto t_match = Clock::now();
    corrs = find_correspondences(features, map_edges, map_planes, pose, deskew, opts);
    result.matching_ms += ms_since(t_match);

    if (corrs.size() < static_cast<std::size_t>(opts.min_correspondences)) {
      result.status = OptimizerStatus::Degenerate;
      result.pose = init;
      result.converged = false;
      return result;
    }

    // warm-up solve, then trim the largest residuals
    if (!lm_iterations(corrs, pose, opts.warmup_iterations, false, opts, lm,
                       result.solve_ms)) {
      result.status = OptimizerStatus::Diverged;
      break;
    }
    for (Correspondence& c : corrs) c.residual = evaluate_residual(c, pose);
    const std::size_t before = corrs.size();
    corrs = trim_outliers(corrs, opts.trim_fraction);
    result.trimmed += before - corrs.size();
    if (corrs.size() < static_cast<std::size_t>(opts.min_correspondences)) {
      result.status = OptimizerStatus::Degenerate;
      result.pose = init;
      result.converged = false;
      return result;
    }

    if (!lm_iterations(corrs, pose, opts.max_inner_iterations, true, opts, lm,
                       result.solve_ms)) {
      result.status = OptimizerStatus::Diverged;
      break;
    }

    const InterpolationSpec outer_change = InterpolationSpec::Between(pose_before, pose);
    if (outer_change.angle < opts.rotation_eps &&
        (pose.translation - pose_before.translation).norm() < opts.translation_eps) {
      result.converged = true;
      result.status = OptimizerStatus::Converged;
      break;
    }
  }

  if (!result.converged && result.status == OptimizerStatus::Converged)
    result.status = OptimizerStatus::MaxIterations;

  result.pose = pose;
  result.pose.stamp = deskew.enabled ? deskew.unit_t_end : init.stamp;
  result.final_cost = total_cost(corrs, pose, opts);
  for (const Correspondence& c : corrs)
    (c.kind == FeatureKind::Edge ? result.edge_count : result.plane_count) += 1;
  return result;
}

}  // namespace loam

#include "loam/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "loam/motion_compensation.hpp"
#include "loam/point_selection.hpp"

namespace loam {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::vector<MapPoint> project_features(const std::vector<FeaturePoint>& features,
                                       const Pose& pose) {
  std::vector<MapPoint> out;
  out.reserve(features.size());
  for (const FeaturePoint& f : features)
    out.push_back({transform_point(pose, f.position), f.reflectivity});
  return out;
}

std::vector<MapPoint> project_features_deskewed(const std::vector<FeaturePoint>& features,
                                                const Pose& prev, const Pose& end,
                                                double frame_t_start) {
  InterpolationSpec spec = InterpolationSpec::Between(prev, end);
  std::vector<MapPoint> out;
  out.reserve(features.size());
  for (const FeaturePoint& f : features) {
    RawPoint rp;
    rp.position = f.position;
    rp.t_offset = static_cast<float>(frame_t_start + f.t_offset - spec.t_begin);
    out.push_back({deskew_project(rp, spec, prev), f.reflectivity});
  }
  return out;
}

}  // namespace

Pipeline::Pipeline(const PipelineConfig& config, std::optional<std::string> raw_log_path)
    : cfg_(config), map_(std::make_unique<FeatureMap>(config.edge_voxel_size,
                                                      config.plane_voxel_size,
                                                      config.max_points_per_voxel)) {
  cfg_.validate();
  if (raw_log_path) raw_log_ = std::make_unique<RawLogWriter>(*raw_log_path);
}

Pipeline::~Pipeline() {
  if (index_build_.valid()) index_build_.wait();
}

void Pipeline::bootstrap(const Frame& first_frame) {
  if (bootstrapped_) throw std::logic_error("pipeline already bootstrapped");
  auto [selected, report] = select_points(first_frame, cfg_);
  (void)report;
  const FeatureCloud features = extract_features(selected, cfg_);
  if (features.empty())
    throw InitializationFailed("bootstrap: no features extractable from first frame");

  const Pose identity = Pose::Identity(first_frame.t_end);
  map_->insert(FeatureKind::Edge, project_features(features.edges, identity));
  map_->insert(FeatureKind::Plane, project_features(features.planes, identity));
  map_->publish_index(FeatureKind::Edge, map_->build_index(FeatureKind::Edge));
  map_->publish_index(FeatureKind::Plane, map_->build_index(FeatureKind::Plane));
  map_->registered_frames = 1;

  pose_ = identity;
  prev_pose_ = Pose::Identity(first_frame.t_start);
  bootstrapped_ = true;

  OdometryRecord rec;
  rec.frame_index = first_frame.index;
  rec.stamp = first_frame.t_end;
  rec.pose = identity;
  rec.converged = true;
  records_.push_back(rec);

  if (raw_log_) raw_log_->append(first_frame, identity);
}

void Pipeline::wait_for_indexes() {
  if (!index_build_.valid()) return;
  auto [edges, planes] = index_build_.get();
  map_->publish_index(FeatureKind::Edge, std::move(edges));
  map_->publish_index(FeatureKind::Plane, std::move(planes));
}

void Pipeline::schedule_index_rebuild() {
  // Snapshot the point sets now; the build itself runs on a worker thread
  // and is collected (blocking if needed) before the next frame matches.
  auto edge_points = map_->points(FeatureKind::Edge);
  auto plane_points = map_->points(FeatureKind::Plane);
  const std::uint64_t edge_gen = map_->index(FeatureKind::Edge)->generation() + 1;
  const std::uint64_t plane_gen = map_->index(FeatureKind::Plane)->generation() + 1;
  index_build_ = std::async(std::launch::async,
                            [edge_points = std::move(edge_points),
                             plane_points = std::move(plane_points), edge_gen, plane_gen] {
                              auto e = std::make_shared<const KdTree>(
                                  std::move(edge_points), edge_gen);
                              auto p = std::make_shared<const KdTree>(
                                  std::move(plane_points), plane_gen);
                              return std::make_pair(
                                  std::shared_ptr<const KdTree>(std::move(e)),
                                  std::shared_ptr<const KdTree>(std::move(p)));
                            });
}

void Pipeline::register_unit(const Unit& unit, const Pose& pose, bool deskewed,
                             const Pose& prev_pose) {
  if (deskewed) {
    Pose end = pose;
    end.stamp = unit.t_end;
    map_->insert(FeatureKind::Edge, project_features_deskewed(unit.features.edges,
                                                              prev_pose, end,
                                                              unit.t_start_frame));
    map_->insert(FeatureKind::Plane, project_features_deskewed(unit.features.planes,
                                                               prev_pose, end,
                                                               unit.t_start_frame));
  } else {
    map_->insert(FeatureKind::Edge, project_features(unit.features.edges, pose));
    map_->insert(FeatureKind::Plane, project_features(unit.features.planes, pose));
  }
}

std::vector<OdometryRecord> Pipeline::process_frame(const Frame& frame) {
  if (!bootstrapped_) throw std::logic_error("pipeline not bootstrapped");

  const auto t_total = Clock::now();
  StageTiming frame_timing;

  // --- build units: selection + extraction per (sub-)frame -----------------
  std::vector<Unit> units;
  const bool piecewise = cfg_.mode == CompensationMode::Piecewise;
  const bool interp = cfg_.mode == CompensationMode::Interpolate;

  if (piecewise) {
    const auto slices = split_subframes(frame, cfg_.subframes);
    for (const SubFrame& sf : slices) {
      Frame sub;
      sub.index = frame.index;
      sub.t_start = sf.t_start;
      sub.t_end = sf.t_end;
      sub.points.assign(frame.points.begin() + sf.begin, frame.points.begin() + sf.end);
      Unit u;
      u.t_start_frame = frame.t_start;
      u.t_end = sf.t_end;
      u.sub_index = sf.sub_index;
      const auto t_sel = Clock::now();
      auto [selected, report] = select_points(sub, cfg_);
      (void)report;
      frame_timing.selection_ms += ms_since(t_sel);
      const auto t_ext = Clock::now();
      u.features = extract_features(selected, cfg_);
      frame_timing.extraction_ms += ms_since(t_ext);
      units.push_back(std::move(u));
    }
  } else {
    Unit u;
    u.t_start_frame = frame.t_start;
    u.t_end = frame.t_end;
    const auto t_sel = Clock::now();
    auto [selected, report] = select_points(frame, cfg_);
    (void)report;
    frame_timing.selection_ms += ms_since(t_sel);
    const auto t_ext = Clock::now();
    u.features = extract_features(selected, cfg_);
    frame_timing.extraction_ms += ms_since(t_ext);
    units.push_back(std::move(u));
  }

  // --- matching against the frozen map snapshot ----------------------------
  wait_for_indexes();
  auto edge_index = map_->index(FeatureKind::Edge);
  auto plane_index = map_->index(FeatureKind::Plane);

  Pose init = pose_;
  if (cfg_.constant_velocity_init) {
    const Pose rel = compose(inverse(prev_pose_), pose_);
    init = compose(pose_, rel);
  }
  const Pose prev_frame_pose = pose_;

  // Constant-velocity prediction of the frame-end pose, used as the fixed
  // deskew interpolation endpoint (time-scaled in case the last recorded
  // interval was a sub-frame).
  Pose predicted_end = prev_frame_pose;
  {
    const double dt_prev = pose_.stamp - prev_pose_.stamp;
    const double dt_new = frame.t_end - pose_.stamp;
    if (dt_prev > 0.0 && dt_new > 0.0) {
      const Pose rel = compose(inverse(prev_pose_), pose_);
      const double scale = dt_new / dt_prev;
      Eigen::AngleAxisd aa(rel.orientation);
      Pose rel_scaled;
      rel_scaled.orientation = Eigen::Quaterniond(
          Eigen::AngleAxisd(aa.angle() * scale, aa.axis()));
      rel_scaled.translation = scale * rel.translation;
      predicted_end = compose(pose_, rel_scaled);
    }
  }
  predicted_end.stamp = frame.t_end;

  std::vector<OptimizationResult> results(units.size());
  auto run_unit = [&](std::size_t i) {
    DeskewContext deskew;
    if (interp || (piecewise && cfg_.combined_interpolation)) {
      deskew.enabled = true;
      deskew.prev_pose = prev_frame_pose;
      deskew.predicted_end = predicted_end;
      deskew.frame_t_start = frame.t_start;
      deskew.unit_t_end = units[i].t_end;
    }
    results[i] = optimize(units[i].features, *edge_index, *plane_index, init,
                          cfg_.optimizer, deskew);
  };

  if (units.size() > 1 && cfg_.threads > 1) {
    std::vector<std::thread> workers;
    workers.reserve(units.size());
    for (std::size_t i = 0; i < units.size(); ++i) workers.emplace_back(run_unit, i);
    for (auto& w : workers) w.join();
  } else {
    for (std::size_t i = 0; i < units.size(); ++i) run_unit(i);
  }

  // --- registration, in sub-frame order ------------------------------------
  std::vector<OdometryRecord> out;
  for (std::size_t i = 0; i < units.size(); ++i) {
    const Unit& u = units[i];
    OptimizationResult& res = results[i];
    frame_timing.matching_ms += res.matching_ms;
    frame_timing.solve_ms += res.solve_ms;

    OdometryRecord rec;
    rec.frame_index = frame.index;
    rec.sub_index = u.sub_index;
    rec.stamp = u.t_end;
    rec.converged = res.converged;
    rec.degenerate = res.status == OptimizerStatus::Degenerate;
    rec.edge_correspondences = res.edge_count;
    rec.plane_correspondences = res.plane_count;
    rec.trimmed = res.trimmed;

    Pose unit_pose = rec.degenerate ? init : res.pose;
    unit_pose.stamp = u.t_end;
    rec.pose = unit_pose;

    // diverged solves keep their best-so-far pose for odometry output but
    // never contribute features to the map
    if (!rec.degenerate && res.status != OptimizerStatus::Diverged) {
      const auto t_reg = Clock::now();
      const bool deskewed = interp || (piecewise && cfg_.combined_interpolation);
      register_unit(u, unit_pose, deskewed, prev_frame_pose);
      frame_timing.register_ms += ms_since(t_reg);
    }
    prev_pose_ = pose_;
    pose_ = unit_pose;
    out.push_back(rec);
  }
  map_->registered_frames += 1;

  const auto t_idx = Clock::now();
  schedule_index_rebuild();
  frame_timing.index_ms += ms_since(t_idx);  // scheduling cost only; build overlaps

  if (raw_log_) raw_log_->append(frame, pose_);

  frame_timing.total_ms = ms_since(t_total);
  out.front().timing = frame_timing;
  for (auto& rec : out) records_.push_back(rec);
  return out;
}

}  // namespace loam

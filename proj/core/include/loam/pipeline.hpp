#pragma once

#include <future>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "loam/feature_extraction.hpp"
#include "loam/feature_map.hpp"
#include "loam/pose_optimizer.hpp"
#include "loam/raw_log.hpp"
#include "loam/types.hpp"

namespace loam {

class InitializationFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct StageTiming {
  double selection_ms = 0.0;
  double extraction_ms = 0.0;
  double matching_ms = 0.0;
  double solve_ms = 0.0;
  double register_ms = 0.0;
  double index_ms = 0.0;
  double total_ms = 0.0;
};

/// One odometry output: one per frame, or one per sub-frame in piecewise mode.
struct OdometryRecord {
  std::uint64_t frame_index = 0;
  int sub_index = 0;
  double stamp = 0.0;
  Pose pose;
  bool converged = false;
  bool degenerate = false;
  std::size_t edge_correspondences = 0;
  std::size_t plane_correspondences = 0;
  std::size_t trimmed = 0;
  StageTiming timing;
};

/// The full odometry-and-mapping loop: select points, extract features,
/// deskew / split per the compensation mode, optimize each unit against the
/// global feature map, register the result, and schedule a background index
/// rebuild. Map updates and odometry output happen at the same rate.
class Pipeline {
 public:
  explicit Pipeline(const PipelineConfig& config,
                    std::optional<std::string> raw_log_path = std::nullopt);
  ~Pipeline();

  Pipeline(const Pipeline&) = delete;
  Pipeline& operator=(const Pipeline&) = delete;

  /// Registers the first frame at the identity pose and builds the initial
  /// indexes. Throws InitializationFailed if no features can be extracted.
  void bootstrap(const Frame& first_frame);

  bool bootstrapped() const { return bootstrapped_; }

  /// Processes one frame; requires bootstrap() first. Returns one record per
  /// unit. A degenerate registration keeps the initial-guess pose, flags the
  /// record, and skips map insertion for that unit.
  std::vector<OdometryRecord> process_frame(const Frame& frame);

  const FeatureMap& map() const { return *map_; }
  const Pose& current_pose() const { return pose_; }
  const std::vector<OdometryRecord>& records() const { return records_; }

 private:
  struct Unit {
    FeatureCloud features;
    double t_start_frame = 0.0;  // absolute frame start, reference for t_offsets
    double t_end = 0.0;          // absolute end of the unit
    int sub_index = 0;
  };

  void wait_for_indexes();
  void schedule_index_rebuild();
  void register_unit(const Unit& unit, const Pose& pose, bool deskewed,
                     const Pose& prev_pose);

  PipelineConfig cfg_;
  std::unique_ptr<FeatureMap> map_;
  Pose pose_;       // pose at the end of the last processed unit
  Pose prev_pose_;  // one unit earlier, for constant-velocity extrapolation
  bool bootstrapped_ = false;
  std::vector<OdometryRecord> records_;
  std::unique_ptr<RawLogWriter> raw_log_;
  std::future<std::pair<std::shared_ptr<const KdTree>, std::shared_ptr<const KdTree>>>
      index_build_;
};

}  // namespace loam

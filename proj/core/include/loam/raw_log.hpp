#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "loam/types.hpp"

namespace loam {

/// Append-only binary log of raw frames with their estimated poses.
/// Layout (little-endian): header {magic "LSFV", version u32}, then per
/// frame {frame_index u64, point_count u64, pose 7 x f64
/// (tx ty tz qx qy qz qw), points as point_count x (x y z reflectivity
/// t_offset, all f32)}.
class RawLogWriter {
 public:
  explicit RawLogWriter(const std::string& path);

  /// Returns false (and stays silent) on storage failure; odometry goes on.
  bool append(const Frame& frame, const Pose& pose);

  bool good() const { return out_.good(); }

  static constexpr std::uint32_t kVersion = 1;

 private:
  std::ofstream out_;
};

struct RawLogFrame {
  std::uint64_t frame_index = 0;
  Pose pose;
  std::vector<RawPoint> points;
};

/// Reads a whole raw log back. Throws std::runtime_error on a bad header or
/// truncated record.
std::vector<RawLogFrame> read_raw_log(const std::string& path);

}  // namespace loam

#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "loam/feature_map.hpp"
#include "loam/types.hpp"

namespace loam {

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// --- trajectory files: "stamp tx ty tz qx qy qz qw" per line ---------------

void save_trajectory(const std::string& path, const std::vector<Pose>& poses);
std::vector<Pose> load_trajectory(const std::string& path);

// --- frame CSV: header "frame,seq,x,y,z,reflectivity,t_offset" -------------

void save_frames_csv(const std::string& path, const std::vector<Frame>& frames);

enum class FrameFormat { Csv, BinaryLog };

/// Loads frames from CSV or from the binary raw-point log. Malformed rows
/// and non-monotone t_offsets raise ParseError naming the line.
std::vector<Frame> load_frames(const std::string& path, FrameFormat format,
                               double frame_rate = 20.0);

// --- PLY map output --------------------------------------------------------

enum class PlyFormat { Ascii, BinaryLittleEndian };

struct PlyPoint {
  Eigen::Vector3d position{0, 0, 0};
  std::uint8_t feature_type = 0;  // 0 edge, 1 plane
  float reflectivity = 0.f;
};

void save_ply(const std::string& path, const std::vector<PlyPoint>& points,
              PlyFormat format);
std::vector<PlyPoint> load_ply(const std::string& path);

std::vector<PlyPoint> map_to_ply(const FeatureMap& map);

// --- plain-text config: "key value" per line, '#' comments -----------------

/// Applies file keys onto `cfg`; unknown keys raise ParseError.
void apply_config_file(const std::string& path, PipelineConfig& cfg);

CompensationMode parse_mode(const std::string& name);
std::string mode_name(CompensationMode mode);

}  // namespace loam

#include "loam/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "loam/raw_log.hpp"

namespace loam {

namespace {

[[noreturn]] void parse_fail(const std::string& path, int line, const std::string& what) {
  throw ParseError(path + ":" + std::to_string(line) + ": " + what);
}

}  // namespace

void save_trajectory(const std::string& path, const std::vector<Pose>& poses) {
  std::ofstream out(path);
  if (!out.good()) throw ParseError("cannot open " + path + " for writing");
  out << std::setprecision(17);
  for (const Pose& p : poses) {
    out << p.stamp << ' ' << p.translation.x() << ' ' << p.translation.y() << ' '
        << p.translation.z() << ' ' << p.orientation.x() << ' ' << p.orientation.y()
        << ' ' << p.orientation.z() << ' ' << p.orientation.w() << '\n';
  }
}

std::vector<Pose> load_trajectory(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw ParseError("cannot open " + path);
  std::vector<Pose> poses;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ss(line);
    double stamp, tx, ty, tz, qx, qy, qz, qw;
    if (!(ss >> stamp >> tx >> ty >> tz >> qx >> qy >> qz >> qw))
      parse_fail(path, line_no, "expected 'stamp tx ty tz qx qy qz qw'");
    Pose p;
    p.stamp = stamp;
    p.translation = {tx, ty, tz};
    p.orientation = Eigen::Quaterniond(qw, qx, qy, qz);
    if (std::abs(p.orientation.norm() - 1.0) > 1e-6)
      parse_fail(path, line_no, "quaternion is not unit");
    if (!poses.empty() && stamp <= poses.back().stamp)
      parse_fail(path, line_no, "stamps must be ascending");
    poses.push_back(p);
  }
  return poses;
}

void save_frames_csv(const std::string& path, const std::vector<Frame>& frames) {
  std::ofstream out(path);
  if (!out.good()) throw ParseError("cannot open " + path + " for writing");
  out << "frame,seq,x,y,z,reflectivity,t_offset\n";
  out << std::setprecision(17);
  for (const Frame& f : frames)
    for (const RawPoint& p : f.points)
      out << f.index << ',' << p.seq << ',' << p.position.x() << ',' << p.position.y()
          << ',' << p.position.z() << ',' << p.reflectivity << ',' << p.t_offset << '\n';
}

std::vector<Frame> load_frames(const std::string& path, FrameFormat format,
                               double frame_rate) {
  std::vector<Frame> frames;
  if (format == FrameFormat::BinaryLog) {
    for (RawLogFrame& lf : read_raw_log(path)) {
      Frame f;
      f.index = lf.frame_index;
      f.t_start = static_cast<double>(lf.frame_index) / frame_rate;
      f.t_end = f.t_start + 1.0 / frame_rate;
      f.points = std::move(lf.points);
      frames.push_back(std::move(f));
    }
    return frames;
  }

  std::ifstream in(path);
  if (!in.good()) throw ParseError("cannot open " + path);
  std::string line;
  int line_no = 1;
  if (!std::getline(in, line) || line.rfind("frame,seq,x,y,z,reflectivity,t_offset", 0) != 0)
    parse_fail(path, 1, "missing CSV header");
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    std::uint64_t frame_idx;
    std::uint32_t seq;
    double x, y, z, refl, t_offset;
    std::string extra;
    if (!(ss >> frame_idx >> seq >> x >> y >> z >> refl >> t_offset) || (ss >> extra))
      parse_fail(path, line_no, "expected 7 fields 'frame,seq,x,y,z,reflectivity,t_offset'");
    if (frames.empty() || frames.back().index != frame_idx) {
      if (!frames.empty() && frame_idx < frames.back().index)
        parse_fail(path, line_no, "frame indices must be non-decreasing");
      Frame f;
      f.index = frame_idx;
      f.t_start = static_cast<double>(frame_idx) / frame_rate;
      f.t_end = f.t_start + 1.0 / frame_rate;
      frames.push_back(f);
    }
    if (!frames.back().points.empty() &&
        t_offset <= frames.back().points.back().t_offset)
      parse_fail(path, line_no, "t_offset must be strictly increasing within a frame");
    RawPoint p;
    p.position = {x, y, z};
    p.reflectivity = static_cast<float>(refl);
    p.t_offset = static_cast<float>(t_offset);
    p.seq = seq;
    frames.back().points.push_back(p);
  }
  return frames;
}

// --- PLY -------------------------------------------------------------------

void save_ply(const std::string& path, const std::vector<PlyPoint>& points,
              PlyFormat format) {
  std::ofstream out(path, std::ios::binary);
  if (!out.good()) throw ParseError("cannot open " + path + " for writing");
  out << "ply\nformat "
      << (format == PlyFormat::Ascii ? "ascii" : "binary_little_endian")
      << " 1.0\nelement vertex " << points.size()
      << "\nproperty float x\nproperty float y\nproperty float z\n"
         "property uchar feature_type\nproperty float reflectivity\nend_header\n";
  if (format == PlyFormat::Ascii) {
    out << std::setprecision(9);
    for (const PlyPoint& p : points)
      out << static_cast<float>(p.position.x()) << ' ' << static_cast<float>(p.position.y())
          << ' ' << static_cast<float>(p.position.z()) << ' '
          << static_cast<int>(p.feature_type) << ' ' << p.reflectivity << '\n';
  } else {
    for (const PlyPoint& p : points) {
      const float xyz[3] = {static_cast<float>(p.position.x()),
                            static_cast<float>(p.position.y()),
                            static_cast<float>(p.position.z())};
      out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
      out.write(reinterpret_cast<const char*>(&p.feature_type), 1);
      out.write(reinterpret_cast<const char*>(&p.reflectivity), sizeof(float));
    }
  }
}

std::vector<PlyPoint> load_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw ParseError("cannot open " + path);
  std::string line;
  bool binary = false;
  std::size_t count = 0;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.rfind("format", 0) == 0) binary = line.find("binary_little_endian") != std::string::npos;
    if (line.rfind("element vertex", 0) == 0) count = std::stoull(line.substr(15));
    if (line == "end_header") break;
  }
  std::vector<PlyPoint> points;
  points.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    PlyPoint p;
    if (binary) {
      float xyz[3];
      float refl;
      std::uint8_t type;
      in.read(reinterpret_cast<char*>(xyz), sizeof(xyz));
      in.read(reinterpret_cast<char*>(&type), 1);
      in.read(reinterpret_cast<char*>(&refl), sizeof(float));
      if (!in) throw ParseError(path + ": truncated binary vertex data");
      p.position = {xyz[0], xyz[1], xyz[2]};
      p.feature_type = type;
      p.reflectivity = refl;
    } else {
      if (!std::getline(in, line)) throw ParseError(path + ": truncated vertex list");
      std::istringstream ss(line);
      double x, y, z, refl;
      int type;
      if (!(ss >> x >> y >> z >> type >> refl))
        throw ParseError(path + ": malformed vertex line");
      p.position = {x, y, z};
      p.feature_type = static_cast<std::uint8_t>(type);
      p.reflectivity = static_cast<float>(refl);
    }
    points.push_back(p);
  }
  return points;
}

std::vector<PlyPoint> map_to_ply(const FeatureMap& map) {
  std::vector<PlyPoint> out;
  for (const FeatureKind kind : {FeatureKind::Edge, FeatureKind::Plane}) {
    const auto& pts = map.points(kind);
    const auto& refl = map.reflectivities(kind);
    for (std::size_t i = 0; i < pts.size(); ++i)
      out.push_back({pts[i], kind == FeatureKind::Edge ? std::uint8_t{0} : std::uint8_t{1},
                     refl[i]});
  }
  return out;
}

// --- config ----------------------------------------------------------------

CompensationMode parse_mode(const std::string& name) {
  if (name == "none") return CompensationMode::None;
  if (name == "interp") return CompensationMode::Interpolate;
  if (name == "piecewise") return CompensationMode::Piecewise;
  throw ParseError("unknown compensation mode '" + name + "'");
}

std::string mode_name(CompensationMode mode) {
  switch (mode) {
    case CompensationMode::None: return "none";
    case CompensationMode::Interpolate: return "interp";
    case CompensationMode::Piecewise: return "piecewise";
  }
  return "none";
}

void apply_config_file(const std::string& path, PipelineConfig& cfg) {
  std::ifstream in(path);
  if (!in.good()) throw ParseError("cannot open config " + path);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::istringstream ss(raw);
    std::string key;
    if (!(ss >> key)) continue;

    auto number = [&]() {
      double v;
      if (!(ss >> v)) parse_fail(path, line_no, "expected numeric value for " + key);
      return v;
    };
    if (key == "mode") {
      std::string m;
      if (!(ss >> m)) parse_fail(path, line_no, "mode needs a value");
      cfg.mode = parse_mode(m);
    } else if (key == "min_depth") cfg.min_depth = number();
    else if (key == "fringe_angle_deg") cfg.fringe_angle_deg = number();
    else if (key == "intensity_low") cfg.intensity_low = number();
    else if (key == "intensity_high") cfg.intensity_high = number();
    else if (key == "incident_low_deg") cfg.incident_low_deg = number();
    else if (key == "incident_high_deg") cfg.incident_high_deg = number();
    else if (key == "hidden_factor") cfg.hidden_factor = number();
    else if (key == "neighbor_depth_jump") cfg.neighbor_depth_jump = number();
    else if (key == "smoothness_half_window") cfg.smoothness_half_window = static_cast<int>(number());
    else if (key == "c_edge") cfg.c_edge = number();
    else if (key == "c_plane") cfg.c_plane = number();
    else if (key == "sectors") cfg.sectors = static_cast<int>(number());
    else if (key == "max_edge_per_sector") cfg.max_edge_per_sector = static_cast<int>(number());
    else if (key == "max_plane_per_sector") cfg.max_plane_per_sector = static_cast<int>(number());
    else if (key == "reflectivity_ratio") cfg.reflectivity_ratio = number();
    else if (key == "reflectivity_half_window") cfg.reflectivity_half_window = static_cast<int>(number());
    else if (key == "reflectivity_min_run") cfg.reflectivity_min_run = static_cast<int>(number());
    else if (key == "segment_seq_gap") cfg.segment_seq_gap = static_cast<int>(number());
    else if (key == "segment_dist_gap") cfg.segment_dist_gap = number();
    else if (key == "subframes") cfg.subframes = static_cast<int>(number());
    else if (key == "combined_interpolation") cfg.combined_interpolation = number() != 0;
    else if (key == "edge_voxel_size") cfg.edge_voxel_size = number();
    else if (key == "plane_voxel_size") cfg.plane_voxel_size = number();
    else if (key == "max_points_per_voxel") cfg.max_points_per_voxel = static_cast<int>(number());
    else if (key == "frame_rate") cfg.frame_rate = number();
    else if (key == "threads") cfg.threads = static_cast<int>(number());
    else if (key == "constant_velocity_init") cfg.constant_velocity_init = number() != 0;
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(number());
    else if (key == "max_outer_iterations") cfg.optimizer.max_outer_iterations = static_cast<int>(number());
    else if (key == "warmup_iterations") cfg.optimizer.warmup_iterations = static_cast<int>(number());
    else if (key == "max_inner_iterations") cfg.optimizer.max_inner_iterations = static_cast<int>(number());
    else if (key == "trim_fraction") cfg.optimizer.trim_fraction = number();
    else if (key == "rotation_eps") cfg.optimizer.rotation_eps = number();
    else if (key == "translation_eps") cfg.optimizer.translation_eps = number();
    else if (key == "min_correspondences") cfg.optimizer.min_correspondences = static_cast<int>(number());
    else if (key == "edge_weight") cfg.optimizer.edge_weight = number();
    else if (key == "plane_weight") cfg.optimizer.plane_weight = number();
    else if (key == "max_correspondence_distance") cfg.optimizer.max_correspondence_distance = number();
    else if (key == "max_step_rotation") cfg.optimizer.max_step_rotation = number();
    else if (key == "max_step_translation") cfg.optimizer.max_step_translation = number();
    else if (key == "damping_init") cfg.optimizer.damping_init = number();
    else if (key == "damping_increase") cfg.optimizer.damping_increase = number();
    else if (key == "damping_decrease") cfg.optimizer.damping_decrease = number();
    else if (key == "max_damping_retries") cfg.optimizer.max_damping_retries = static_cast<int>(number());
    else parse_fail(path, line_no, "unknown config key '" + key + "'");
  }
}

}  // namespace loam

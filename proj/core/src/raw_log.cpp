#include "loam/raw_log.hpp"

#include <cstring>
#include <stdexcept>

namespace loam {

namespace {

constexpr char kMagic[4] = {'L', 'S', 'F', 'V'};

template <typename T>
void write_scalar(std::ofstream& out, T value) {
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_scalar(std::ifstream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw std::runtime_error("raw log: truncated record");
  return value;
}

}  // namespace

RawLogWriter::RawLogWriter(const std::string& path) : out_(path, std::ios::binary) {
  if (out_.good()) {
    out_.write(kMagic, 4);
    write_scalar<std::uint32_t>(out_, kVersion);
  }
}

bool RawLogWriter::append(const Frame& frame, const Pose& pose) {
  if (!out_.good()) return false;
  write_scalar<std::uint64_t>(out_, frame.index);
  write_scalar<std::uint64_t>(out_, frame.points.size());
  const double pose_data[7] = {pose.translation.x(), pose.translation.y(),
                               pose.translation.z(), pose.orientation.x(),
                               pose.orientation.y(), pose.orientation.z(),
                               pose.orientation.w()};
  out_.write(reinterpret_cast<const char*>(pose_data), sizeof(pose_data));
  for (const RawPoint& p : frame.points) {
    const float rec[5] = {static_cast<float>(p.position.x()),
                          static_cast<float>(p.position.y()),
                          static_cast<float>(p.position.z()), p.reflectivity, p.t_offset};
    out_.write(reinterpret_cast<const char*>(rec), sizeof(rec));
  }
  out_.flush();
  return out_.good();
}

std::vector<RawLogFrame> read_raw_log(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.good()) throw std::runtime_error("raw log: cannot open " + path);
  char magic[4];
  in.read(magic, 4);
  if (!in || std::memcmp(magic, kMagic, 4) != 0)
    throw std::runtime_error("raw log: bad magic");
  const auto version = read_scalar<std::uint32_t>(in);
  if (version != RawLogWriter::kVersion)
    throw std::runtime_error("raw log: unsupported version");

  std::vector<RawLogFrame> frames;
  while (in.peek() != EOF) {
    RawLogFrame f;
    f.frame_index = read_scalar<std::uint64_t>(in);
    const auto count = read_scalar<std::uint64_t>(in);
    double pose_data[7];
    in.read(reinterpret_cast<char*>(pose_data), sizeof(pose_data));
    if (!in) throw std::runtime_error("raw log: truncated pose");
    f.pose.translation = {pose_data[0], pose_data[1], pose_data[2]};
    f.pose.orientation = Eigen::Quaterniond(pose_data[6], pose_data[3], pose_data[4],
                                            pose_data[5]);
    f.points.reserve(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      float rec[5];
      in.read(reinterpret_cast<char*>(rec), sizeof(rec));
      if (!in) throw std::runtime_error("raw log: truncated point data");
      RawPoint p;
      p.position = {rec[0], rec[1], rec[2]};
      p.reflectivity = rec[3];
      p.t_offset = rec[4];
      p.seq = static_cast<std::uint32_t>(i);
      f.points.push_back(p);
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

}  // namespace loam

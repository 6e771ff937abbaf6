#pragma once

#include <optional>
#include <string>

#include "loam/io.hpp"
#include "loam/types.hpp"

namespace loam {

/// Exit codes of the batch runner.
enum CliExit : int {
  kExitOk = 0,
  kExitConfigError = 1,
  kExitInputError = 2,
  kExitDegenerate = 3,  // more than 20% of frames failed to register
};

enum class MapEmit { Off, PlyAscii, PlyBinary };

struct CliOptions {
  std::string input_path;
  FrameFormat format = FrameFormat::Csv;
  std::optional<std::string> config_path;
  std::optional<std::string> mode;       // none | interp | piecewise
  std::optional<int> subframes;
  std::optional<int> threads;
  std::string out_dir = ".";
  std::optional<std::string> truth_path;
  std::optional<std::uint64_t> seed;
  MapEmit emit_map = MapEmit::PlyBinary;
  bool persist_raw = false;
};

/// Runs the odometry-and-mapping pipeline over a recorded input and writes
/// trajectory, map, timing, and (with truth) metric files into `out_dir`.
/// Reports errors on stderr and returns a CliExit code.
int run_pipeline(const CliOptions& options);

}  // namespace loam

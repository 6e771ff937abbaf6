#include "loam/cli_runner.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>

#include "loam/metrics.hpp"
#include "loam/pipeline.hpp"

namespace loam {

int run_pipeline(const CliOptions& options) {
  PipelineConfig cfg;
  try {
    if (options.config_path) apply_config_file(*options.config_path, cfg);
    if (options.mode) cfg.mode = parse_mode(*options.mode);
    if (options.subframes) cfg.subframes = *options.subframes;
    if (options.threads) cfg.threads = *options.threads;
    if (options.seed) cfg.seed = *options.seed;
    cfg.validate();
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  std::vector<Frame> frames;
  std::vector<Pose> truth;
  try {
    if (!std::filesystem::exists(options.input_path))
      throw ParseError("input not found: " + options.input_path);
    frames = load_frames(options.input_path, options.format, cfg.frame_rate);
    if (frames.empty()) throw ParseError("input contains no frames");
    if (options.truth_path) truth = load_trajectory(*options.truth_path);
  } catch (const std::exception& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInputError;
  }

  std::error_code ec;
  std::filesystem::create_directories(options.out_dir, ec);
  const auto out = [&](const std::string& name) {
    return (std::filesystem::path(options.out_dir) / name).string();
  };

  std::optional<std::string> raw_path;
  if (options.persist_raw) raw_path = out("raw_points.bin");

  try {
    Pipeline pipeline(cfg, raw_path);
    std::size_t degenerate_frames = 0;
    for (const Frame& frame : frames) {
      if (!pipeline.bootstrapped()) {
        pipeline.bootstrap(frame);
        continue;
      }
      const auto records = pipeline.process_frame(frame);
      bool any_degenerate = false;
      for (const auto& rec : records) any_degenerate |= rec.degenerate;
      if (any_degenerate) ++degenerate_frames;
    }

    std::vector<Pose> trajectory;
    for (const auto& rec : pipeline.records()) trajectory.push_back(rec.pose);
    save_trajectory(out("trajectory.txt"), trajectory);

    save_timing_report(out("timing.txt"), timing_report(pipeline.records()));

    if (options.emit_map != MapEmit::Off) {
      save_ply(out("map.ply"), map_to_ply(pipeline.map()),
               options.emit_map == MapEmit::PlyAscii ? PlyFormat::Ascii
                                                     : PlyFormat::BinaryLittleEndian);
    }

    if (!truth.empty()) {
      std::ofstream metrics(out("metrics.txt"));
      try {
        metrics << "distance_error_percent " << distance_error_percent(trajectory, truth)
                << '\n';
        const EulerError euler = euler_error(trajectory, truth);
        metrics << "euler_mean_deg " << euler.mean_deg.transpose() << '\n';
        metrics << "euler_max_deg " << euler.max_deg.transpose() << '\n';
        metrics << "aligned_poses " << euler.aligned << '\n';
      } catch (const std::exception& e) {
        metrics << "error " << e.what() << '\n';
      }
    }

    if (degenerate_frames * 5 > frames.size()) {
      std::cerr << "pipeline degenerate on " << degenerate_frames << " of "
                << frames.size() << " frames\n";
      return kExitDegenerate;
    }
  } catch (const InitializationFailed& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return kExitInputError;
  }
  return kExitOk;
}

}  // namespace loam

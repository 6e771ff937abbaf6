#include <CLI11.hpp>

#include <string>

#include "loam/cli_runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"LiDAR odometry and mapping for small-FoV rosette-scan sensors"};

  loam::CliOptions opts;
  std::string format = "csv";
  std::string mode;
  std::string emit_map = "ply-binary";
  std::string persist = "off";
  int subframes = 0;
  int threads = 0;
  std::uint64_t seed = 0;
  std::string config_path, truth_path;

  app.add_option("--input", opts.input_path, "Input point file")->required();
  app.add_option("--format", format, "Input format: csv | binary-log")
      ->check(CLI::IsMember({"csv", "binary-log"}));
  app.add_option("--config", config_path, "Pipeline config file (key value lines)");
  app.add_option("--mode", mode, "Motion compensation: none | interp | piecewise")
      ->check(CLI::IsMember({"none", "interp", "piecewise"}));
  app.add_option("--subframes", subframes, "Sub-frames per frame in piecewise mode");
  app.add_option("--threads", threads, "Worker threads for sub-frame matching");
  app.add_option("--out", opts.out_dir, "Output directory")->required();
  app.add_option("--truth", truth_path, "Ground-truth trajectory for metrics");
  app.add_option("--seed", seed, "Random seed override");
  app.add_option("--emit-map", emit_map, "Map output: ply-ascii | ply-binary | off")
      ->check(CLI::IsMember({"ply-ascii", "ply-binary", "off"}));
  app.add_option("--persist-raw", persist, "Raw-point log: on | off")
      ->check(CLI::IsMember({"on", "off"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) ? loam::kExitConfigError : 0;
  }

  opts.format = format == "csv" ? loam::FrameFormat::Csv : loam::FrameFormat::BinaryLog;
  if (!mode.empty()) opts.mode = mode;
  if (app.count("--subframes")) opts.subframes = subframes;
  if (app.count("--threads")) opts.threads = threads;
  if (app.count("--seed")) opts.seed = seed;
  if (!config_path.empty()) opts.config_path = config_path;
  if (!truth_path.empty()) opts.truth_path = truth_path;
  opts.persist_raw = persist == "on";
  opts.emit_map = emit_map == "off"
                      ? loam::MapEmit::Off
                      : (emit_map == "ply-ascii" ? loam::MapEmit::PlyAscii
                                                 : loam::MapEmit::PlyBinary);

  return loam::run_pipeline(opts);
}

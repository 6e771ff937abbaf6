#include <benchmark/benchmark.h>

#include <random>

#include "loam/feature_extraction.hpp"
#include "loam/kd_tree.hpp"
#include "loam/point_selection.hpp"
#include "loam/pose_optimizer.hpp"
#include "loam/simulator.hpp"

using namespace loam;

namespace {

sim::Scene bench_scene() {
  sim::Scene s;
  auto rect = [&](Eigen::Vector3d c, Eigen::Vector3d n, Eigen::Vector3d u, double hu,
                  double hv, double r) {
    sim::Primitive p;
    p.type = sim::Primitive::Type::Rect;
    p.center = c;
    p.normal = n.normalized();
    p.u_axis = (u - u.dot(p.normal) * p.normal).normalized();
    p.half_u = hu;
    p.half_v = hv;
    p.reflectivity = r;
    return s.primitives.push_back(p);
  };
  rect({9, 0, 0}, {-1, 0, 0}, {0, 1, 0}, 6, 6, 3.0);
  rect({7, 2.8, 0}, {-0.8, -0.6, 0}, {0, 0, 1}, 1.5, 1.5, 2.5);
  rect({7, -2.8, 0}, {-0.8, 0.6, 0}, {0, 0, 1}, 1.5, 1.5, 2.5);
  rect({7, 0, 2.8}, {-0.8, 0, -0.6}, {0, 1, 0}, 1.5, 1.5, 2.2);
  rect({7, 0, -2.8}, {-0.8, 0, 0.6}, {0, 1, 0}, 1.5, 1.5, 2.2);
  sim::Primitive box;
  box.type = sim::Primitive::Type::Box;
  box.center = {5.5, 0.8, -0.5};
  box.half_extents = {0.4, 0.4, 0.6};
  box.reflectivity = 1.2;
  s.primitives.push_back(box);
  return s;
}

const sim::SimulatedSequence& bench_sequence() {
  static const sim::SimulatedSequence seq =
      sim::generate({}, bench_scene(), sim::RosetteParams{}, 0.1, 0.0, 7);
  return seq;
}

std::vector<Eigen::Vector3d> random_cloud(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::vector<Eigen::Vector3d> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i) pts.push_back({u(rng), u(rng), u(rng)});
  return pts;
}

void bm_point_selection(benchmark::State& state) {
  const Frame& frame = bench_sequence().frames.front();
  PipelineConfig cfg;
  for (auto _ : state) {
    auto [selected, report] = select_points(frame, cfg);
    benchmark::DoNotOptimize(selected.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(frame.points.size()));
}
BENCHMARK(bm_point_selection)->Unit(benchmark::kMillisecond);

void bm_feature_extraction(benchmark::State& state) {
  const Frame& frame = bench_sequence().frames.front();
  PipelineConfig cfg;
  auto [selected, report] = select_points(frame, cfg);
  for (auto _ : state) {
    FeatureCloud features = extract_features(selected, cfg);
    benchmark::DoNotOptimize(features.edges.data());
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(selected.size()));
}
BENCHMARK(bm_feature_extraction)->Unit(benchmark::kMillisecond);

void bm_kd_build(benchmark::State& state) {
  const auto pts = random_cloud(static_cast<std::size_t>(state.range(0)), 11);
  for (auto _ : state) {
    KdTree tree(pts);
    benchmark::DoNotOptimize(tree.size());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(bm_kd_build)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void bm_kd_knn(benchmark::State& state) {
  const KdTree tree(random_cloud(static_cast<std::size_t>(state.range(0)), 13));
  const auto queries = random_cloud(1024, 17);
  std::size_t qi = 0;
  for (auto _ : state) {
    const auto hits = tree.knn(queries[qi++ & 1023], 5);
    benchmark::DoNotOptimize(hits.data());
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(bm_kd_knn)->Arg(10000)->Arg(100000);

void bm_solve_step(benchmark::State& state) {
  const auto& seq = bench_sequence();
  PipelineConfig cfg;
  cfg.max_edge_per_sector = 100000;
  cfg.max_plane_per_sector = 100000;
  auto [selected, report] = select_points(seq.frames.front(), cfg);
  const FeatureCloud features = extract_features(selected, cfg);
  std::vector<Eigen::Vector3d> edge_pts, plane_pts;
  for (const auto& f : features.edges) edge_pts.push_back(f.position);
  for (const auto& f : features.planes) plane_pts.push_back(f.position);
  const KdTree edges(edge_pts), planes(plane_pts);
  const auto corrs =
      find_correspondences(features, edges, planes, Pose::Identity(), {}, cfg.optimizer);
  const Pose pose = Pose::Identity();
  for (auto _ : state) {
    const SolveStepResult step = solve_step(corrs, pose, 1e-4, cfg.optimizer);
    benchmark::DoNotOptimize(step.increment.translation);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(corrs.size()));
}
BENCHMARK(bm_solve_step);

}  // namespace

BENCHMARK_MAIN();

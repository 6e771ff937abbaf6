#include "loam/feature_extraction.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace loam {

namespace {

FeaturePoint to_feature(const SelectedPoint& sp) {
  FeaturePoint f;
  f.position = sp.point.position;
  f.reflectivity = sp.point.reflectivity;
  f.t_offset = sp.point.t_offset;
  f.seq = sp.point.seq;
  return f;
}

// Contiguous runs of selected points with no scanning gap inside.
std::vector<std::pair<std::size_t, std::size_t>> segment(
    const std::vector<SelectedPoint>& pts, const PipelineConfig& cfg) {
  std::vector<std::pair<std::size_t, std::size_t>> segs;
  if (pts.empty()) return segs;
  std::size_t begin = 0;
  for (std::size_t i = 1; i < pts.size(); ++i) {
    const auto seq_gap = pts[i].point.seq - pts[i - 1].point.seq;
    const double dist = (pts[i].point.position - pts[i - 1].point.position).norm();
    if (seq_gap > static_cast<std::uint32_t>(cfg.segment_seq_gap) ||
        dist > cfg.segment_dist_gap) {
      segs.emplace_back(begin, i);
      begin = i;
    }
  }
  segs.emplace_back(begin, pts.size());
  return segs;
}

int sector_of(const Eigen::Vector3d& p, int sectors) {
  const double az = std::atan2(p.z(), p.y());  // image-plane azimuth
  int s = static_cast<int>((az + kPi) / (2.0 * kPi) * sectors);
  return std::clamp(s, 0, sectors - 1);
}

double median_of(std::vector<float>& v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double med = v[mid];
  if (v.size() % 2 == 0) {
    std::nth_element(v.begin(), v.begin() + mid - 1, v.begin() + mid);
    med = 0.5 * (med + v[mid - 1]);
  }
  return med;
}

}  // namespace

double local_smoothness(const std::vector<Eigen::Vector3d>& window) {
  const std::size_t n = window.size();
  const std::size_t center = n / 2;
  const Eigen::Vector3d& pi = window[center];
  Eigen::Vector3d acc = Eigen::Vector3d::Zero();
  for (std::size_t j = 0; j < n; ++j) {
    if (j == center) continue;
    acc += window[j] - pi;
  }
  const double denom = static_cast<double>(n - 1) * pi.norm();
  return denom > 0 ? acc.norm() / denom : 0.0;
}

std::vector<std::size_t> reflectivity_edges(const std::vector<SelectedPoint>& points,
                                            const PipelineConfig& cfg) {
  std::vector<std::size_t> out;
  const int w = cfg.reflectivity_half_window;
  std::vector<char> candidate(points.size(), 0);

  for (const auto& [begin, end] : segment(points, cfg)) {
    const std::size_t len = end - begin;
    if (len < static_cast<std::size_t>(2 * w + 1)) continue;
    std::vector<float> window;
    for (std::size_t i = begin + w; i + w < end; ++i) {
      window.clear();
      for (std::size_t j = i - w; j <= i + w; ++j) window.push_back(points[j].point.reflectivity);
      const double med = median_of(window);
      const double dev = std::abs(points[i].point.reflectivity - med);
      if (dev / std::max(med, cfg.reflectivity_eps) >= cfg.reflectivity_ratio)
        candidate[i] = 1;
    }
  }

  // suppress runs shorter than min_run
  std::size_t i = 0;
  while (i < candidate.size()) {
    if (!candidate[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < candidate.size() && candidate[j] &&
           (j == i || points[j].point.seq == points[j - 1].point.seq + 1))
      ++j;
    if (j - i >= static_cast<std::size_t>(cfg.reflectivity_min_run))
      for (std::size_t k = i; k < j; ++k) out.push_back(k);
    i = j;
  }
  return out;
}

FeatureCloud extract_features(const std::vector<SelectedPoint>& points,
                              const PipelineConfig& cfg) {
  FeatureCloud cloud;
  const int w = cfg.smoothness_half_window;
  if (points.size() < static_cast<std::size_t>(2 * w + 1)) return cloud;

  struct Candidate {
    std::size_t index;
    double c;
  };
  std::vector<std::vector<Candidate>> edge_by_sector(cfg.sectors);
  std::vector<std::vector<Candidate>> plane_by_sector(cfg.sectors);

  std::vector<Eigen::Vector3d> window(2 * w + 1);
  for (const auto& [begin, end] : segment(points, cfg)) {
    if (end - begin < static_cast<std::size_t>(2 * w + 1)) continue;
    for (std::size_t i = begin + w; i + w < end; ++i) {
      for (int j = -w; j <= w; ++j) window[j + w] = points[i + j].point.position;
      const double c = local_smoothness(window);
      const int s = sector_of(points[i].point.position, cfg.sectors);
      if (c >= cfg.c_edge)
        edge_by_sector[s].push_back({i, c});
      else if (c <= cfg.c_plane)
        plane_by_sector[s].push_back({i, c});
    }
  }

  std::unordered_set<std::uint32_t> edge_seqs;
  for (auto& sec : edge_by_sector) {
    std::stable_sort(sec.begin(), sec.end(),
                     [](const Candidate& a, const Candidate& b) { return a.c > b.c; });
    const std::size_t take = std::min<std::size_t>(sec.size(), cfg.max_edge_per_sector);
    for (std::size_t k = 0; k < take; ++k) {
      cloud.edges.push_back(to_feature(points[sec[k].index]));
      edge_seqs.insert(points[sec[k].index].point.seq);
    }
  }
  for (const std::size_t idx : reflectivity_edges(points, cfg)) {
    if (edge_seqs.insert(points[idx].point.seq).second)
      cloud.edges.push_back(to_feature(points[idx]));
  }
  for (auto& sec : plane_by_sector) {
    std::stable_sort(sec.begin(), sec.end(),
                     [](const Candidate& a, const Candidate& b) { return a.c < b.c; });
    std::size_t taken = 0;
    for (std::size_t k = 0; k < sec.size() &&
                            taken < static_cast<std::size_t>(cfg.max_plane_per_sector);
         ++k) {
      const auto seq = points[sec[k].index].point.seq;
      if (edge_seqs.count(seq)) continue;  // edges win the overlap
      cloud.planes.push_back(to_feature(points[sec[k].index]));
      ++taken;
    }
  }
  return cloud;
}

}  // namespace loam

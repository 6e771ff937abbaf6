#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "loam/types.hpp"

namespace loam {

/// Per-point physical attributes: depth, deflection angle from the X axis,
/// normalized intensity, and (when scan neighbors exist) the incident angle
/// between the laser ray and the local surface chord.
struct PointAttributes {
  double depth = 0.0;              // m
  double deflection = 0.0;         // rad, in [0, pi/2]
  double intensity = 0.0;          // reflectivity / depth^2
  std::optional<double> incident;  // rad, in [0, pi]; absent at gaps/boundaries
  bool hidden = false;
};

struct SelectionReport {
  std::vector<std::size_t> kept_indices;  // positions in the input frame
  std::size_t kept = 0;
  std::size_t rejected_invalid = 0;  // depth below minimum, dropped pre-attributes
  std::size_t rejected_fringe = 0;
  std::size_t rejected_intensity = 0;
  std::size_t rejected_incident = 0;
  std::size_t rejected_hidden = 0;

  std::size_t total() const {
    return kept + rejected_invalid + rejected_fringe + rejected_intensity +
           rejected_incident + rejected_hidden;
  }
};

struct SelectedPoint {
  RawPoint point;
  PointAttributes attributes;
  std::size_t source_index = 0;  // position in the originating frame
};

struct AttributedFrame {
  std::vector<SelectedPoint> points;  // valid returns only, scan order
  std::size_t invalid_count = 0;
};

/// Attributes of one point given its scan-order neighbors (seq +/- 1), which
/// may be absent at frame boundaries. The incident angle uses the chord
/// prev->next as the local surface proxy and is left absent when either
/// neighbor is missing, the chord degenerates, or a neighbor sits on a
/// different object (depth jump above `neighbor_depth_jump`).
PointAttributes compute_attributes(const RawPoint& p, const RawPoint* prev,
                                   const RawPoint* next, const PipelineConfig& cfg);

/// Occlusion test: p_e is hidden behind the adjacent-in-scan-order p_d.
bool is_hidden(const RawPoint& p_e, const RawPoint& p_d, double factor = 0.1);

/// Attributes for every valid return of a frame, computed once against the
/// raw scan-order neighbors. Invalid returns (depth < min_depth) are dropped
/// here and only counted.
AttributedFrame compute_frame_attributes(const Frame& frame, const PipelineConfig& cfg);

/// Applies rejection filters 1..4 (fringe, intensity, incident, hidden) in
/// order to pre-attributed points. Idempotent: attributes are frozen, so
/// filtering its own output changes nothing.
std::pair<std::vector<SelectedPoint>, SelectionReport> filter_points(
    const AttributedFrame& attributed, const PipelineConfig& cfg);

/// compute_frame_attributes + filter_points. Survivors keep scan order.
std::pair<std::vector<SelectedPoint>, SelectionReport> select_points(
    const Frame& frame, const PipelineConfig& cfg);

}  // namespace loam

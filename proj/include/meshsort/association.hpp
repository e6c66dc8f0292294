#pragma once

#include <span>
#include <vector>

#include "meshsort/assignment.hpp"
#include "meshsort/geometry.hpp"

namespace meshsort {

struct Detection {
  BoundingBox box;
  double confidence = 1.0;

  friend bool operator==(const Detection&, const Detection&) = default;
};

CostMatrix iou_cost(std::span<const BoundingBox> tracks, std::span<const BoundingBox> dets,
                    double gate = 1.0);

CostMatrix biou_cost(std::span<const BoundingBox> tracks, std::span<const BoundingBox> dets,
                     double buffer_scale, double gate = 1.0);

struct AssociationParams {
  double conf_high = 0.6;
  double conf_low = 0.1;
  double gate_stage1 = 0.8;  ///< IoU cost gate, i.e. IoU >= 0.2
  double gate_stage2 = 0.5;  ///< buffered-IoU cost gate
  double buffer_scale = 0.3;
};

/// Which association rounds a track takes part in.
enum class Pool {
  Primary,    ///< active tracks and lost-maintained proposals: both stages
  Secondary,  ///< lost or occluded tracks: second stage only
};

struct Candidate {
  BoundingBox box;
  Pool pool = Pool::Primary;
};

struct StagedMatch {
  int track = 0;
  int detection = 0;
  int stage = 1;

  friend bool operator==(const StagedMatch&, const StagedMatch&) = default;
};

struct AssociationOutcome {
  std::vector<StagedMatch> matches;       ///< ascending by track
  std::vector<int> unmatched_tracks;      ///< ascending
  std::vector<int> unmatched_detections;  ///< ascending, confidence >= conf_low only
};

/// Stage 1 matches high-confidence detections to primary candidates by IoU.
/// Stage 2 matches every track left over (plus secondary candidates) to the
/// low-confidence detections and the stage-1 leftovers by buffered IoU.
/// Detections under conf_low take part in neither stage.
AssociationOutcome two_stage_associate(std::span<const Candidate> tracks,
                                       std::span<const Detection> dets,
                                       const AssociationParams& params);

}  // namespace meshsort

#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <span>
#include <string_view>
#include <vector>

#include "meshsort/association.hpp"
#include "meshsort/kalman.hpp"
#include "meshsort/mesh.hpp"

namespace meshsort {

enum class TrackStatus { Tentative, Tracked, LostMaintained, Lost, Removed };

std::string_view to_string(TrackStatus s);

/// The only lifecycle edges a track may take between two frames.
bool is_allowed_transition(TrackStatus from, TrackStatus to);

struct LifecycleConfig {
  int lm_buffer = 3;     ///< l: frames a missed track stays matchable
  int max_age = 30;      ///< missed frames before a lost track is dropped
  int eta = 8;           ///< age reduction for losses inside frequent cells
  int min_hits = 3;      ///< consecutive matches that confirm a new track
  double occlusion_iou = 0.3;

  void validate() const;
};

/// Where lost-maintain applies relative to the frequent-loss set.
enum class LmRegionRule {
  Prose,       ///< outside frequent cells; shortened ages inside them
  Pseudocode,  ///< inside frequent cells only
};

/// Lifecycle switches shared by every track of one tracker.
struct LifecyclePolicy {
  LifecycleConfig config;
  bool lost_maintain = true;
  bool velocity_rollback = true;
  bool location_ages = true;
  LmRegionRule region_rule = LmRegionRule::Prose;
  RollbackMode rollback_mode = RollbackMode::Oldest;
  bool zero_size_rate = false;
  double lm_noise_scale = 10.0;
};

struct Track {
  int id = 0;
  TrackStatus status = TrackStatus::Tentative;
  KalmanTrackState kf;
  VelocityBuffer vel;
  int hits = 0;
  int lm_count = 0;
  int lost_count = 0;
  std::optional<CellId> lost_cell;
  BoundingBox last_box;
  double confidence = 0.0;
  std::int64_t start_frame = 0;
  std::int64_t last_match_frame = 0;
  std::int64_t predicts_since_match = 0;

  /// Current filter estimate as a box.
  BoundingBox box() const { return state_box(kf); }
};

Track make_track(int id, const Detection& det, std::int64_t frame, const MotionModel& model,
                 std::size_t velocity_capacity, int min_hits);

struct MeshEvent {
  enum class Kind { Lost, Refound };
  Kind kind = Kind::Lost;
  int track_id = 0;
  Point2 where;
  CellId cell;
  std::int64_t frame = 0;
};

/// Kalman update, velocity record and confirmation. A track coming back
/// from Lost reports a refound event at the detection's bottom-middle when a
/// grid is supplied.
std::optional<MeshEvent> on_matched(Track& track, const Detection& det, std::int64_t frame,
                                    const MotionModel& model, const LifecyclePolicy& policy,
                                    MeshGrid* grid);

/// Applies lost-maintain, the transition to Lost (velocity rollback and the
/// lost event), location-wise ages and removal for a track with no match
/// this frame. `grid` may be null when the mesh is disabled.
std::optional<MeshEvent> on_missed(Track& track, std::int64_t frame, const MotionModel& model,
                                   const LifecyclePolicy& policy, MeshGrid* grid);

/// Feeds the predicted measurement back as an observation with R scaled by
/// `noise_scale`, and moves last_box to the predicted box.
void lost_maintain_step(Track& track, const MotionModel& model, double noise_scale);

/// Ids of lost-maintained and lost tracks whose box overlaps some tracked
/// track's box with IoU >= occlusion_iou.
std::set<int> infer_occlusion(std::span<const Track> tracks, double occlusion_iou);

}  // namespace meshsort

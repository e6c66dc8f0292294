#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "meshsort/association.hpp"
#include "meshsort/kalman.hpp"
#include "meshsort/mesh.hpp"
#include "meshsort/track.hpp"

namespace meshsort {

struct TrackerConfig {
  LifecycleConfig lifecycle;
  AssociationParams association;
  double init_thresh = 0.7;

  double frame_width = 1920.0;
  double frame_height = 1080.0;
  int mesh_m = 4;
  int mesh_n = 4;
  double lambda = 0.02;
  int mesh_refresh_interval = 1;

  int vel_buffer = 5;
  RollbackMode vel_rollback = RollbackMode::Oldest;
  bool zero_size_rate = false;

  NoiseWeights noise;
  double lm_noise_scale = 10.0;
  LmRegionRule lm_region_rule = LmRegionRule::Prose;

  bool use_mesh = true;
  bool use_lost_maintain = true;
  bool use_vel_buffer = true;
  bool use_location_ages = true;
  /// Lost-maintained tracks are reported with their predicted boxes.
  bool emit_virtual = true;

  /// Throws ConfigError on any out-of-range field.
  void validate() const;

  /// Same thresholds with the mesh, lost-maintain, velocity-buffer and
  /// location-age features switched off.
  TrackerConfig with_features_off() const;
};

struct FrameDetections {
  std::int64_t frame = 0;
  std::vector<Detection> detections;

  friend bool operator==(const FrameDetections&, const FrameDetections&) = default;
};

struct TrackOutput {
  int id = 0;
  BoundingBox box;
  double confidence = 0.0;
  bool is_virtual = false;

  friend bool operator==(const TrackOutput&, const TrackOutput&) = default;
};

struct FrameOutput {
  std::int64_t frame = 0;
  std::vector<TrackOutput> tracks;  ///< ascending by id

  friend bool operator==(const FrameOutput&, const FrameOutput&) = default;
};

struct TrackerStats {
  std::int64_t frames = 0;
  std::int64_t predicts = 0;
  /// Predicts spent on tracks after their final match: removed tracks plus
  /// tracks still unmatched when the stats are read.
  std::int64_t doomed_predicts = 0;
  std::int64_t tracks_created = 0;
};

/// Optional second association pass (e.g. appearance similarity). The
/// default is empty and leaves the outcome untouched.
using AppearanceHook =
    std::function<void(std::span<const Track>, std::span<const Detection>, AssociationOutcome&)>;

/// Single-sequence online tracker. Not thread-safe; use one instance per
/// sequence.
class Tracker {
 public:
  explicit Tracker(TrackerConfig config);

  /// Processes one frame. Throws SequenceError unless the frame index is
  /// larger than the previous one.
  FrameOutput step(const FrameDetections& fd);

  const TrackerConfig& config() const { return config_; }
  const std::vector<Track>& tracks() const { return tracks_; }
  const MeshGrid* mesh() const { return mesh_ ? &*mesh_ : nullptr; }
  const std::vector<MeshEvent>& mesh_events() const { return events_; }
  TrackerStats stats() const;

  void set_appearance_hook(AppearanceHook hook) { hook_ = std::move(hook); }

 private:
  TrackerConfig config_;
  MotionModel model_;
  LifecyclePolicy policy_;
  std::optional<MeshGrid> mesh_;
  std::vector<Track> tracks_;
  std::vector<MeshEvent> events_;
  AppearanceHook hook_;
  TrackerStats stats_;
  std::int64_t last_frame_ = 0;
  int next_id_ = 1;
};

/// Reference two-stage tracker without any of the mesh, lost-maintain,
/// velocity-buffer or location-age logic.
class BaselineTracker {
 public:
  explicit BaselineTracker(TrackerConfig config);

  FrameOutput step(const FrameDetections& fd);

 private:
  struct Entry {
    int id;
    bool confirmed;
    bool lost;
    int hits;
    int misses;
    double confidence;
    KalmanTrackState kf;
  };

  TrackerConfig config_;
  MotionModel model_;
  std::vector<Entry> entries_;
  std::int64_t last_frame_ = 0;
  int next_id_ = 1;
};

std::vector<FrameOutput> run(const TrackerConfig& config, std::span<const FrameDetections> frames);

std::vector<FrameOutput> run_baseline(const TrackerConfig& config,
                                      std::span<const FrameDetections> frames);

}  // namespace meshsort

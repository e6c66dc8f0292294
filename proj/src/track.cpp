#include "meshsort/track.hpp"

#include <stdexcept>

namespace meshsort {

std::string_view to_string(TrackStatus s) {
  switch (s) {
    case TrackStatus::Tentative: return "tentative";
    case TrackStatus::Tracked: return "tracked";
    case TrackStatus::LostMaintained: return "lost-maintained";
    case TrackStatus::Lost: return "lost";
    case TrackStatus::Removed: return "removed";
  }
  return "?";
}

bool is_allowed_transition(TrackStatus from, TrackStatus to) {
  using S = TrackStatus;
  switch (from) {
    case S::Tentative: return to == S::Tentative || to == S::Tracked || to == S::Removed;
    case S::Tracked: return to == S::Tracked || to == S::LostMaintained || to == S::Lost;
    case S::LostMaintained: return to == S::Tracked || to == S::LostMaintained || to == S::Lost;
    case S::Lost: return to == S::Tracked || to == S::Lost || to == S::Removed;
    case S::Removed: return to == S::Removed;
  }
  return false;
}

void LifecycleConfig::validate() const {
  if (lm_buffer < 0) throw std::invalid_argument("lm_buffer must be >= 0");
  if (max_age <= 0) throw std::invalid_argument("max_age must be positive");
  if (eta < 0 || eta >= max_age) throw std::invalid_argument("eta must be in [0, max_age)");
  if (min_hits < 1) throw std::invalid_argument("min_hits must be >= 1");
  if (!(occlusion_iou > 0.0 && occlusion_iou <= 1.0)) {
    throw std::invalid_argument("occlusion_iou must be in (0, 1]");
  }
}

Track make_track(int id, const Detection& det, std::int64_t frame, const MotionModel& model,
                 std::size_t velocity_capacity, int min_hits) {
  Track t;
  t.id = id;
  t.vel = VelocityBuffer(velocity_capacity);
  t.kf = initiate(box_to_measurement(det.box), model);
  t.hits = 1;
  t.status = t.hits >= min_hits ? TrackStatus::Tracked : TrackStatus::Tentative;
  t.last_box = det.box;
  t.confidence = det.confidence;
  t.start_frame = frame;
  t.last_match_frame = frame;
  return t;
}

std::optional<MeshEvent> on_matched(Track& track, const Detection& det, std::int64_t frame,
                                    const MotionModel& model, const LifecyclePolicy& policy,
                                    MeshGrid* grid) {
  const TrackStatus prior = track.status;
  track.kf = update(track.kf, box_to_measurement(det.box), model);
  track.vel.record(track.kf);
  ++track.hits;

  std::optional<MeshEvent> event;
  if (prior == TrackStatus::Lost && grid != nullptr) {
    const Point2 p = bottom_middle(det.box);
    event = MeshEvent{MeshEvent::Kind::Refound, track.id, p, grid->record_refound(p), frame};
  }

  if (prior == TrackStatus::Tentative) {
    if (track.hits >= policy.config.min_hits) track.status = TrackStatus::Tracked;
  } else {
    track.status = TrackStatus::Tracked;
  }
  track.lm_count = 0;
  track.lost_count = 0;
  track.lost_cell.reset();
  track.last_box = det.box;
  track.confidence = det.confidence;
  track.last_match_frame = frame;
  track.predicts_since_match = 0;
  return event;
}

void lost_maintain_step(Track& track, const MotionModel& model, double noise_scale) {
  track.kf = update(track.kf, project(track.kf), model, noise_scale);
  track.last_box = track.box();
}

std::optional<MeshEvent> on_missed(Track& track, std::int64_t frame, const MotionModel& model,
                                   const LifecyclePolicy& policy, MeshGrid* grid) {
  const auto& cfg = policy.config;
  switch (track.status) {
    case TrackStatus::Removed:
      return std::nullopt;
    case TrackStatus::Tentative:
      track.status = TrackStatus::Removed;
      return std::nullopt;
    default:
      break;
  }

  ++track.lost_count;
  std::optional<MeshEvent> event;

  if (track.status == TrackStatus::Tracked || track.status == TrackStatus::LostMaintained) {
    bool region_ok = true;
    if (grid != nullptr) {
      const bool in_frequent = grid->is_frequent(grid->cell_of(bottom_middle(track.box())));
      region_ok = policy.region_rule == LmRegionRule::Prose ? !in_frequent : in_frequent;
    }
    if (policy.lost_maintain && region_ok && track.lm_count < cfg.lm_buffer) {
      track.status = TrackStatus::LostMaintained;
      ++track.lm_count;
      lost_maintain_step(track, model, policy.lm_noise_scale);
      return std::nullopt;
    }

    track.status = TrackStatus::Lost;
    if (policy.velocity_rollback) {
      if (auto rolled = rollback_velocity(track.kf, track.vel, policy.rollback_mode,
                                          policy.zero_size_rate)) {
        track.kf = *rolled;
      }
    }
    if (grid != nullptr) {
      const Point2 p = bottom_middle(track.last_box);
      const CellId cell = grid->record_lost(p);
      track.lost_cell = cell;
      event = MeshEvent{MeshEvent::Kind::Lost, track.id, p, cell, frame};
    }
  }

  int age = cfg.max_age;
  if (policy.location_ages && grid != nullptr && track.lost_cell &&
      grid->is_frequent(*track.lost_cell)) {
    age -= cfg.eta;
  }
  if (track.lost_count > age) track.status = TrackStatus::Removed;
  return event;
}

std::set<int> infer_occlusion(std::span<const Track> tracks, double occlusion_iou) {
  std::vector<BoundingBox> tracked;
  for (const auto& t : tracks) {
    if (t.status == TrackStatus::Tracked) tracked.push_back(t.box());
  }
  std::set<int> occluded;
  for (const auto& t : tracks) {
    if (t.status != TrackStatus::LostMaintained && t.status != TrackStatus::Lost) continue;
    const BoundingBox b = t.box();
    for (const auto& other : tracked) {
      if (iou(b, other) >= occlusion_iou) {
        occluded.insert(t.id);
        break;
      }
    }
  }
  return occluded;
}

}  // namespace meshsort

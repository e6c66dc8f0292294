#include "meshsort/tracker.hpp"

#include <algorithm>
#include <string>

#include "meshsort/errors.hpp"

namespace meshsort {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

LifecyclePolicy make_policy(const TrackerConfig& c) {
  LifecyclePolicy p;
  p.config = c.lifecycle;
  p.lost_maintain = c.use_lost_maintain && c.lifecycle.lm_buffer > 0;
  p.velocity_rollback = c.use_vel_buffer;
  p.location_ages = c.use_location_ages;
  p.region_rule = c.lm_region_rule;
  p.rollback_mode = c.vel_rollback;
  p.zero_size_rate = c.zero_size_rate;
  p.lm_noise_scale = c.lm_noise_scale;
  return p;
}

}  // namespace

void TrackerConfig::validate() const {
  try {
    lifecycle.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto& a = association;
  require(a.conf_low >= 0.0 && a.conf_low < a.conf_high && a.conf_high <= 1.0,
          "need 0 <= conf_low < conf_high <= 1");
  require(init_thresh >= 0.0 && init_thresh <= 1.0, "init_thresh must be in [0, 1]");
  require(a.gate_stage1 >= 0.0 && a.gate_stage1 <= 1.0, "gate_stage1 must be in [0, 1]");
  require(a.gate_stage2 >= 0.0 && a.gate_stage2 <= 1.0, "gate_stage2 must be in [0, 1]");
  require(a.buffer_scale >= 0.0, "buffer_scale must be >= 0");
  require(frame_width > 0.0 && frame_height > 0.0, "frame size must be positive");
  require(mesh_m > 0 && mesh_n > 0, "mesh size must be positive");
  require(lambda >= 0.0, "lambda must be >= 0");
  require(mesh_refresh_interval >= 1, "mesh_refresh_interval must be >= 1");
  require(vel_buffer >= 1 && vel_buffer <= 30, "vel_buffer must be in [1, 30]");
  require(noise.position > 0.0 && noise.velocity > 0.0, "noise weights must be positive");
  require(lm_noise_scale > 0.0, "lm_noise_scale must be positive");
}

TrackerConfig TrackerConfig::with_features_off() const {
  TrackerConfig c = *this;
  c.use_mesh = false;
  c.use_lost_maintain = false;
  c.use_vel_buffer = false;
  c.use_location_ages = false;
  return c;
}

Tracker::Tracker(TrackerConfig config)
    : config_(std::move(config)), model_(config_.noise), policy_(make_policy(config_)) {
  config_.validate();
  if (config_.use_mesh) {
    mesh_.emplace(config_.mesh_m, config_.mesh_n, config_.frame_width, config_.frame_height);
  }
}

FrameOutput Tracker::step(const FrameDetections& fd) {
  if (fd.frame <= last_frame_) {
    throw SequenceError("frame " + std::to_string(fd.frame) + " does not follow frame " +
                        std::to_string(last_frame_));
  }
  last_frame_ = fd.frame;
  ++stats_.frames;
  MeshGrid* grid = mesh_ ? &*mesh_ : nullptr;

  for (auto& t : tracks_) {
    t.kf = predict(t.kf, model_);
    ++t.predicts_since_match;
  }
  stats_.predicts += static_cast<std::int64_t>(tracks_.size());

  const auto occluded = infer_occlusion(tracks_, config_.lifecycle.occlusion_iou);

  std::vector<Candidate> candidates;
  candidates.reserve(tracks_.size());
  for (const auto& t : tracks_) {
    Pool pool = Pool::Primary;
    if (t.status == TrackStatus::Lost ||
        (t.status == TrackStatus::LostMaintained && occluded.contains(t.id))) {
      pool = Pool::Secondary;
    }
    candidates.push_back({t.box(), pool});
  }

  auto outcome = two_stage_associate(candidates, fd.detections, config_.association);
  if (hook_) hook_(tracks_, fd.detections, outcome);

  for (int d : outcome.unmatched_detections) {
    const auto& det = fd.detections[static_cast<std::size_t>(d)];
    if (det.confidence < config_.init_thresh) continue;
    tracks_.push_back(make_track(next_id_++, det, fd.frame, model_,
                                 static_cast<std::size_t>(config_.vel_buffer),
                                 config_.lifecycle.min_hits));
    ++stats_.tracks_created;
  }

  for (const auto& m : outcome.matches) {
    auto& t = tracks_[static_cast<std::size_t>(m.track)];
    if (auto e = on_matched(t, fd.detections[static_cast<std::size_t>(m.detection)], fd.frame,
                            model_, policy_, grid)) {
      events_.push_back(*e);
    }
  }
  for (int idx : outcome.unmatched_tracks) {
    auto& t = tracks_[static_cast<std::size_t>(idx)];
    if (auto e = on_missed(t, fd.frame, model_, policy_, grid)) events_.push_back(*e);
  }

  std::erase_if(tracks_, [this](const Track& t) {
    if (t.status != TrackStatus::Removed) return false;
    stats_.doomed_predicts += t.predicts_since_match;
    return true;
  });

  if (grid != nullptr && fd.frame % config_.mesh_refresh_interval == 0) {
    grid->identify(ThresholdFn{config_.lambda}, static_cast<double>(fd.frame));
  }

  FrameOutput out{fd.frame, {}};
  for (const auto& t : tracks_) {
    const bool is_virtual = t.status == TrackStatus::LostMaintained;
    if (t.status == TrackStatus::Tracked || (is_virtual && config_.emit_virtual)) {
      out.tracks.push_back({t.id, t.box(), t.confidence, is_virtual});
    }
  }
  std::sort(out.tracks.begin(), out.tracks.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

TrackerStats Tracker::stats() const {
  TrackerStats s = stats_;
  for (const auto& t : tracks_) {
    if (t.status == TrackStatus::Lost || t.status == TrackStatus::LostMaintained) {
      s.doomed_predicts += t.predicts_since_match;
    }
  }
  return s;
}

std::vector<FrameOutput> run(const TrackerConfig& config, std::span<const FrameDetections> frames) {
  Tracker tracker(config);
  std::vector<FrameOutput> out;
  out.reserve(frames.size());
  for (const auto& fd : frames) out.push_back(tracker.step(fd));
  return out;
}

}  // namespace meshsort

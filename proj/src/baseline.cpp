#include <algorithm>
#include <string>

#include "meshsort/errors.hpp"
#include "meshsort/tracker.hpp"

namespace meshsort {

BaselineTracker::BaselineTracker(TrackerConfig config)
    : config_(std::move(config)), model_(config_.noise) {
  config_.validate();
}

FrameOutput BaselineTracker::step(const FrameDetections& fd) {
  if (fd.frame <= last_frame_) {
    throw SequenceError("frame " + std::to_string(fd.frame) + " does not follow frame " +
                        std::to_string(last_frame_));
  }
  last_frame_ = fd.frame;

  std::vector<Candidate> candidates;
  for (auto& e : entries_) {
    e.kf = predict(e.kf, model_);
    candidates.push_back({state_box(e.kf), e.lost ? Pool::Secondary : Pool::Primary});
  }

  const auto outcome = two_stage_associate(candidates, fd.detections, config_.association);
  const int min_hits = config_.lifecycle.min_hits;

  std::vector<char> removed(entries_.size(), 0);
  for (const auto& m : outcome.matches) {
    auto& e = entries_[static_cast<std::size_t>(m.track)];
    const auto& det = fd.detections[static_cast<std::size_t>(m.detection)];
    e.kf = update(e.kf, box_to_measurement(det.box), model_);
    ++e.hits;
    e.misses = 0;
    e.lost = false;
    e.confirmed = e.confirmed || e.hits >= min_hits;
    e.confidence = det.confidence;
  }
  for (int idx : outcome.unmatched_tracks) {
    auto& e = entries_[static_cast<std::size_t>(idx)];
    if (!e.confirmed) {
      removed[static_cast<std::size_t>(idx)] = 1;
      continue;
    }
    e.lost = true;
    if (++e.misses > config_.lifecycle.max_age) removed[static_cast<std::size_t>(idx)] = 1;
  }

  std::vector<Entry> kept;
  kept.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!removed[i]) kept.push_back(entries_[i]);
  }
  for (int d : outcome.unmatched_detections) {
    const auto& det = fd.detections[static_cast<std::size_t>(d)];
    if (det.confidence < config_.init_thresh) continue;
    kept.push_back({next_id_++, min_hits <= 1, false, 1, 0, det.confidence,
                    initiate(box_to_measurement(det.box), model_)});
  }
  entries_ = std::move(kept);

  FrameOutput out{fd.frame, {}};
  for (const auto& e : entries_) {
    if (e.confirmed && !e.lost) out.tracks.push_back({e.id, state_box(e.kf), e.confidence, false});
  }
  std::sort(out.tracks.begin(), out.tracks.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

std::vector<FrameOutput> run_baseline(const TrackerConfig& config,
                                      std::span<const FrameDetections> frames) {
  BaselineTracker tracker(config);
  std::vector<FrameOutput> out;
  out.reserve(frames.size());
  for (const auto& fd : frames) out.push_back(tracker.step(fd));
  return out;
}

}  // namespace meshsort

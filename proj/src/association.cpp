#include "meshsort/association.hpp"

#include <algorithm>
#include <stdexcept>

namespace meshsort {
namespace {

template <typename Overlap>
CostMatrix overlap_cost(std::span<const BoundingBox> tracks, std::span<const BoundingBox> dets,
                        double gate, Overlap overlap) {
  CostMatrix c;
  c.gate = gate;
  c.entries.resize(static_cast<Eigen::Index>(tracks.size()), static_cast<Eigen::Index>(dets.size()));
  for (std::size_t r = 0; r < tracks.size(); ++r) {
    for (std::size_t d = 0; d < dets.size(); ++d) {
      c.entries(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(d)) =
          1.0 - overlap(tracks[r], dets[d]);
    }
  }
  return c;
}

}  // namespace

CostMatrix iou_cost(std::span<const BoundingBox> tracks, std::span<const BoundingBox> dets,
                    double gate) {
  return overlap_cost(tracks, dets, gate, [](const auto& a, const auto& b) { return iou(a, b); });
}

CostMatrix biou_cost(std::span<const BoundingBox> tracks, std::span<const BoundingBox> dets,
                     double buffer_scale, double gate) {
  if (!(buffer_scale >= 0.0)) throw std::invalid_argument("buffer_scale must be non-negative");
  return overlap_cost(tracks, dets, gate, [buffer_scale](const auto& a, const auto& b) {
    return buffered_iou(a, b, buffer_scale);
  });
}

AssociationOutcome two_stage_associate(std::span<const Candidate> tracks,
                                       std::span<const Detection> dets,
                                       const AssociationParams& params) {
  if (!(params.conf_low < params.conf_high)) {
    throw std::invalid_argument("conf_low must be below conf_high");
  }

  std::vector<int> high;
  std::vector<int> low;
  for (std::size_t d = 0; d < dets.size(); ++d) {
    const double conf = dets[d].confidence;
    if (conf >= params.conf_high) {
      high.push_back(static_cast<int>(d));
    } else if (conf >= params.conf_low) {
      low.push_back(static_cast<int>(d));
    }
  }

  std::vector<int> primary;
  std::vector<int> secondary;
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    (tracks[t].pool == Pool::Primary ? primary : secondary).push_back(static_cast<int>(t));
  }

  auto boxes_of_tracks = [&](const std::vector<int>& idx) {
    std::vector<BoundingBox> out;
    out.reserve(idx.size());
    for (int i : idx) out.push_back(tracks[static_cast<std::size_t>(i)].box);
    return out;
  };
  auto boxes_of_dets = [&](const std::vector<int>& idx) {
    std::vector<BoundingBox> out;
    out.reserve(idx.size());
    for (int i : idx) out.push_back(dets[static_cast<std::size_t>(i)].box);
    return out;
  };

  AssociationOutcome out;

  // Stage 1.
  const auto s1 = assign(iou_cost(boxes_of_tracks(primary), boxes_of_dets(high), params.gate_stage1));
  for (const auto& [r, c] : s1.matches) {
    out.matches.push_back({primary[static_cast<std::size_t>(r)], high[static_cast<std::size_t>(c)], 1});
  }

  // Stage 2: leftover tracks (stage-1 misses, then secondary) against low
  // detections followed by stage-1 leftovers.
  std::vector<int> rest_tracks;
  for (int r : s1.unmatched_rows) rest_tracks.push_back(primary[static_cast<std::size_t>(r)]);
  rest_tracks.insert(rest_tracks.end(), secondary.begin(), secondary.end());
  std::vector<int> rest_dets = low;
  for (int c : s1.unmatched_cols) rest_dets.push_back(high[static_cast<std::size_t>(c)]);

  const auto s2 = assign(biou_cost(boxes_of_tracks(rest_tracks), boxes_of_dets(rest_dets),
                                   params.buffer_scale, params.gate_stage2));
  for (const auto& [r, c] : s2.matches) {
    out.matches.push_back(
        {rest_tracks[static_cast<std::size_t>(r)], rest_dets[static_cast<std::size_t>(c)], 2});
  }
  for (int r : s2.unmatched_rows) out.unmatched_tracks.push_back(rest_tracks[static_cast<std::size_t>(r)]);
  for (int c : s2.unmatched_cols) out.unmatched_detections.push_back(rest_dets[static_cast<std::size_t>(c)]);

  std::sort(out.matches.begin(), out.matches.end(),
            [](const auto& a, const auto& b) { return a.track < b.track; });
  std::sort(out.unmatched_tracks.begin(), out.unmatched_tracks.end());
  std::sort(out.unmatched_detections.begin(), out.unmatched_detections.end());
  return out;
}

}  // namespace meshsort

#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "meshsort/geometry.hpp"
#include "meshsort/tracker.hpp"

namespace meshsort {

/// id -> (frame -> box). At most one box per id and frame by construction.
using Trajectories = std::map<int, std::map<std::int64_t, BoundingBox>>;

Trajectories trajectories_from_outputs(std::span<const FrameOutput> outputs);

struct IdBox {
  int id = 0;
  BoundingBox box;
};

struct FrameCorrespondence {
  std::vector<std::pair<int, int>> matches;  ///< (gt id, result id)
  int tp = 0;
  int fp = 0;
  int fn = 0;
  int switches = 0;
};

/// CLEAR-MOT frame matching. Pairs from `last_match` (gt id -> result id)
/// are kept while their IoU stays >= iou_thr; the rest are matched with
/// maximum cardinality and minimum 1 - IoU. `last_match` is updated.
FrameCorrespondence match_frame(std::span<const IdBox> gt, std::span<const IdBox> res,
                                double iou_thr, std::map<int, int>& last_match);

struct ClearMot {
  double mota = 0.0;
  std::int64_t fp = 0;
  std::int64_t fn = 0;
  std::int64_t idsw = 0;
  std::int64_t fm = 0;
  std::int64_t mt = 0;
  std::int64_t pt = 0;
  std::int64_t ml = 0;
  std::int64_t tp = 0;
  std::int64_t gt_total = 0;
  std::int64_t gt_tracks = 0;
};

struct Hota {
  static constexpr std::size_t kAlphas = 19;
  static std::array<double, kAlphas> alphas();

  double hota = 0.0;
  double deta = 0.0;
  double assa = 0.0;
  std::array<double, kAlphas> hota_alpha{};
  std::array<double, kAlphas> deta_alpha{};
  std::array<double, kAlphas> assa_alpha{};
};

/// Throws MetricError when `gt` is empty.
ClearMot clear_mot(const Trajectories& gt, const Trajectories& res, double iou_thr = 0.5);

double idf1(const Trajectories& gt, const Trajectories& res, double iou_thr = 0.5);

Hota hota(const Trajectories& gt, const Trajectories& res);

struct MetricsReport {
  ClearMot clear;
  double idf1 = 0.0;
  Hota hota;

  /// Aligned human-readable table.
  std::string table() const;
  /// One `metric=value` per line.
  std::string key_values() const;
};

MetricsReport evaluate(const Trajectories& gt, const Trajectories& res, double iou_thr = 0.5);

}  // namespace meshsort

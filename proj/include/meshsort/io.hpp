#pragma once

#include <istream>
#include <span>
#include <string>
#include <vector>

#include "meshsort/metrics.hpp"
#include "meshsort/tracker.hpp"

namespace meshsort {

/// `frame,id,left,top,width,height,conf,x,y,z`, 10 fields. The id and the
/// trailing fields are ignored. Result is grouped by frame, ascending.
/// Throws ParseError with the offending line.
std::vector<FrameDetections> parse_detections(std::istream& in, const std::string& source = "<detections>");

/// `frame,id,left,top,width,height,flag,class,visibility`, 9 fields. Rows
/// are kept when flag == 1 and class == 1 unless `keep_all` is set; the
/// visibility column is parsed but never filtered on.
Trajectories parse_ground_truth(std::istream& in, const std::string& source = "<ground truth>",
                                bool keep_all = false);

/// Tracker output in the 10-field result format.
Trajectories parse_results(std::istream& in, const std::string& source = "<results>");

/// One line per (frame, id), frames then ids ascending, two decimals.
std::string format_results(std::span<const FrameOutput> outputs);
std::string format_detections(std::span<const FrameDetections> frames);
/// Writes flag 1 and class 1; visibility from `visibility` when present.
std::string format_ground_truth(const Trajectories& gt,
                                const std::map<int, std::map<std::int64_t, double>>& visibility = {});

/// Inserts empty frames so that the sequence covers 1..last frame.
std::vector<FrameDetections> fill_frame_gaps(std::span<const FrameDetections> frames);

struct RunConfig {
  TrackerConfig tracker;
  std::string dets;
  std::string out;
};

/// Flat `key = value` file, `#` comments. Unknown keys are rejected.
/// Throws ConfigError (parse problems carry the line number).
RunConfig parse_config(std::istream& in, const std::string& source = "<config>");
/// Applies one `key = value` pair. Throws ConfigError.
void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value);
std::string format_config(const RunConfig& cfg);

}  // namespace meshsort

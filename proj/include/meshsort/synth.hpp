#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "meshsort/geometry.hpp"
#include "meshsort/metrics.hpp"
#include "meshsort/rng.hpp"
#include "meshsort/tracker.hpp"

namespace meshsort {

/// Box center at frame `t`.
struct Waypoint {
  std::int64_t t = 0;
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

/// Present on frames [spawn, despawn]. The center follows the waypoints
/// linearly and holds the first/last waypoint outside their time range.
struct Agent {
  std::int64_t spawn = 1;
  std::int64_t despawn = 1;
  double width = 40.0;
  double height = 100.0;
  std::vector<Waypoint> path;

  Point2 center_at(std::int64_t t) const;
  BoundingBox box_at(std::int64_t t) const;

  friend bool operator==(const Agent&, const Agent&) = default;
};

/// Forces scale noise on one detection as if the agent were seen with the
/// given visibility.
struct NoiseInjection {
  int agent = 0;  ///< index into SceneConfig::agents
  std::int64_t frame = 0;
  double visibility = 0.5;

  friend bool operator==(const NoiseInjection&, const NoiseInjection&) = default;
};

struct SceneConfig {
  double width = 1920.0;
  double height = 1080.0;
  std::int64_t frames = 100;
  std::vector<Agent> agents;
  std::vector<BoundingBox> occluders;
  std::vector<NoiseInjection> injections;

  double sigma_a = 0.15;
  double sigma_h = 0.1;  ///< aspect-ratio noise
  /// Detections with visibility below this are dropped.
  double drop_visibility = 0.3;
  double miss_prob = 0.0;
  double conf_base = 0.95;
  double conf_penalty = 0.6;
  std::uint64_t seed = 0;

  /// Throws ConfigError.
  void validate() const;

  friend bool operator==(const SceneConfig&, const SceneConfig&) = default;
};

/// Plain-text scene grammar, one statement per line, `#` starts a comment:
///
///   width = 1920            (also height, frames, seed, sigma_a, sigma_h,
///                            drop_visibility, miss_prob, conf_base,
///                            conf_penalty)
///   agent SPAWN DESPAWN W H T:X:Y [T:X:Y ...]
///   occluder LEFT TOP W H
///   inject AGENT FRAME VISIBILITY
///
/// Throws ParseError with the line number.
SceneConfig parse_scene(const std::string& text, const std::string& source = "<scene>");
std::string format_scene(const SceneConfig& cfg);

struct SynthOutput {
  Trajectories gt;                          ///< agent i has id i + 1
  std::vector<FrameDetections> detections;  ///< every frame 1..frames, possibly empty
  std::map<int, std::map<std::int64_t, double>> visibility;
};

SynthOutput generate(const SceneConfig& cfg);

/// Fraction of `box` inside `frame` and not covered by any of `covers`.
double visible_fraction(const BoundingBox& box, const BoundingBox& frame,
                        const std::vector<BoundingBox>& covers);

/// Multiplicative noise on area and aspect ratio, scaled by 1 - visibility.
/// Position is never touched. Always draws two normals when visibility < 1.
Measurement semi_occlusion_noise(const Measurement& z, double visibility, double sigma_a,
                                 double sigma_h, Rng& rng);

namespace scenes {

/// Pedestrians crossing thin pillars, so detections vanish for a few frames.
SceneConfig transient_occlusion(std::uint64_t seed);

/// Most agents leave through the right border; a few wander mid-frame and
/// get occluded.
SceneConfig exit_heavy(std::uint64_t seed);

/// One agent walks behind a wall for `occlusion` frames; the last detection
/// before the wall carries injected scale noise.
SceneConfig semi_occlusion(std::uint64_t seed, int occlusion = 10);

/// Two agents crossing with `overlap` frames of mutual occlusion.
SceneConfig crossing(std::uint64_t seed, int overlap = 5);

/// Random straight-line walkers.
SceneConfig crowd(std::uint64_t seed, int agents, std::int64_t frames);

}  // namespace scenes

}  // namespace meshsort

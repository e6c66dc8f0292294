#include "meshsort/synth.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "meshsort/errors.hpp"

namespace meshsort {

Point2 Agent::center_at(std::int64_t t) const {
  if (path.empty()) return {};
  if (t <= path.front().t) return {path.front().x, path.front().y};
  if (t >= path.back().t) return {path.back().x, path.back().y};
  const auto hi = std::upper_bound(path.begin(), path.end(), t,
                                   [](std::int64_t v, const Waypoint& w) { return v < w.t; });
  const auto lo = hi - 1;
  const double u = static_cast<double>(t - lo->t) / static_cast<double>(hi->t - lo->t);
  return {lo->x + u * (hi->x - lo->x), lo->y + u * (hi->y - lo->y)};
}

BoundingBox Agent::box_at(std::int64_t t) const {
  const Point2 c = center_at(t);
  return {c.x - 0.5 * width, c.y - 0.5 * height, width, height};
}

void SceneConfig::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("scene: " + m); };
  if (!(width > 0.0 && height > 0.0)) fail("frame size must be positive");
  if (frames < 1) fail("frames must be >= 1");
  if (!(sigma_a >= 0.0 && sigma_h >= 0.0)) fail("noise std must be >= 0");
  if (!(drop_visibility >= 0.0 && drop_visibility <= 1.0)) fail("drop_visibility must be in [0, 1]");
  if (!(miss_prob >= 0.0 && miss_prob <= 1.0)) fail("miss_prob must be in [0, 1]");
  if (!(conf_penalty >= 0.0)) fail("conf_penalty must be >= 0");
  for (std::size_t k = 0; k < agents.size(); ++k) {
    const Agent& a = agents[k];
    const std::string tag = "agent " + std::to_string(k) + ": ";
    if (a.spawn > a.despawn) fail(tag + "spawn after despawn");
    if (!(a.width > 0.0 && a.height > 0.0)) fail(tag + "box size must be positive");
    if (a.path.empty()) fail(tag + "needs at least one waypoint");
    for (std::size_t w = 0; w < a.path.size(); ++w) {
      const Waypoint& p = a.path[w];
      if (p.t < a.spawn || p.t > a.despawn) fail(tag + "waypoint time outside [spawn, despawn]");
      if (w > 0 && p.t <= a.path[w - 1].t) fail(tag + "waypoint times must increase");
      if (!std::isfinite(p.x) || !std::isfinite(p.y)) fail(tag + "non-finite waypoint");
    }
  }
  for (const auto& o : occluders) {
    if (!o.valid()) fail("occluder must have positive size");
  }
  for (const auto& inj : injections) {
    if (inj.agent < 0 || static_cast<std::size_t>(inj.agent) >= agents.size()) fail("inject: no such agent");
    if (!(inj.visibility >= 0.0 && inj.visibility <= 1.0)) fail("inject: visibility must be in [0, 1]");
  }
}

namespace {

std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  for (std::string tok; is >> tok;) out.push_back(tok);
  return out;
}

template <typename T>
T to_number(const std::string& tok, const std::string& source, std::size_t line) {
  T v{};
  const char* b = tok.data();
  const char* e = tok.data() + tok.size();
  auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) throw ParseError(source, line, "bad number '" + tok + "'");
  return v;
}

// Shortest text that reads back to the same double.
std::string fmt(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

}  // namespace

SceneConfig parse_scene(const std::string& text, const std::string& source) {
  SceneConfig cfg;
  std::istringstream in(text);
  std::size_t ln = 0;
  for (std::string line; std::getline(in, line);) {
    ++ln;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (const auto eq = line.find('='); eq != std::string::npos) {
      const auto key_tokens = split_ws(line.substr(0, eq));
      const auto val_tokens = split_ws(line.substr(eq + 1));
      if (key_tokens.size() != 1 || val_tokens.size() != 1) throw ParseError(source, ln, "expected 'key = value'");
      const std::string& k = key_tokens[0];
      const std::string& v = val_tokens[0];
      if (k == "width") cfg.width = to_number<double>(v, source, ln);
      else if (k == "height") cfg.height = to_number<double>(v, source, ln);
      else if (k == "frames") cfg.frames = to_number<std::int64_t>(v, source, ln);
      else if (k == "seed") cfg.seed = to_number<std::uint64_t>(v, source, ln);
      else if (k == "sigma_a") cfg.sigma_a = to_number<double>(v, source, ln);
      else if (k == "sigma_h") cfg.sigma_h = to_number<double>(v, source, ln);
      else if (k == "drop_visibility") cfg.drop_visibility = to_number<double>(v, source, ln);
      else if (k == "miss_prob") cfg.miss_prob = to_number<double>(v, source, ln);
      else if (k == "conf_base") cfg.conf_base = to_number<double>(v, source, ln);
      else if (k == "conf_penalty") cfg.conf_penalty = to_number<double>(v, source, ln);
      else throw ParseError(source, ln, "unknown key '" + k + "'");
      continue;
    }
    const auto tok = split_ws(line);
    if (tok.empty()) continue;
    if (tok[0] == "agent") {
      if (tok.size() < 6) throw ParseError(source, ln, "agent needs SPAWN DESPAWN W H and at least one T:X:Y");
      Agent a;
      a.spawn = to_number<std::int64_t>(tok[1], source, ln);
      a.despawn = to_number<std::int64_t>(tok[2], source, ln);
      a.width = to_number<double>(tok[3], source, ln);
      a.height = to_number<double>(tok[4], source, ln);
      for (std::size_t i = 5; i < tok.size(); ++i) {
        const auto c1 = tok[i].find(':');
        const auto c2 = c1 == std::string::npos ? c1 : tok[i].find(':', c1 + 1);
        if (c2 == std::string::npos) throw ParseError(source, ln, "waypoint must be T:X:Y");
        a.path.push_back({to_number<std::int64_t>(tok[i].substr(0, c1), source, ln),
                          to_number<double>(tok[i].substr(c1 + 1, c2 - c1 - 1), source, ln),
                          to_number<double>(tok[i].substr(c2 + 1), source, ln)});
      }
      cfg.agents.push_back(std::move(a));
    } else if (tok[0] == "occluder") {
      if (tok.size() != 5) throw ParseError(source, ln, "occluder needs LEFT TOP W H");
      cfg.occluders.push_back({to_number<double>(tok[1], source, ln), to_number<double>(tok[2], source, ln),
                               to_number<double>(tok[3], source, ln), to_number<double>(tok[4], source, ln)});
    } else if (tok[0] == "inject") {
      if (tok.size() != 4) throw ParseError(source, ln, "inject needs AGENT FRAME VISIBILITY");
      cfg.injections.push_back({to_number<int>(tok[1], source, ln), to_number<std::int64_t>(tok[2], source, ln),
                                to_number<double>(tok[3], source, ln)});
    } else {
      throw ParseError(source, ln, "unknown statement '" + tok[0] + "'");
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ParseError(source, ln, e.what());
  }
  return cfg;
}

std::string format_scene(const SceneConfig& cfg) {
  std::ostringstream os;
  os << "width = " << fmt(cfg.width) << '\n'
     << "height = " << fmt(cfg.height) << '\n'
     << "frames = " << cfg.frames << '\n'
     << "seed = " << cfg.seed << '\n'
     << "sigma_a = " << fmt(cfg.sigma_a) << '\n'
     << "sigma_h = " << fmt(cfg.sigma_h) << '\n'
     << "drop_visibility = " << fmt(cfg.drop_visibility) << '\n'
     << "miss_prob = " << fmt(cfg.miss_prob) << '\n'
     << "conf_base = " << fmt(cfg.conf_base) << '\n'
     << "conf_penalty = " << fmt(cfg.conf_penalty) << '\n';
  for (const auto& o : cfg.occluders) {
    os << "occluder " << fmt(o.left) << ' ' << fmt(o.top) << ' ' << fmt(o.width) << ' ' << fmt(o.height) << '\n';
  }
  for (const auto& a : cfg.agents) {
    os << "agent " << a.spawn << ' ' << a.despawn << ' ' << fmt(a.width) << ' ' << fmt(a.height);
    for (const auto& w : a.path) os << ' ' << w.t << ':' << fmt(w.x) << ':' << fmt(w.y);
    os << '\n';
  }
  for (const auto& inj : cfg.injections) {
    os << "inject " << inj.agent << ' ' << inj.frame << ' ' << fmt(inj.visibility) << '\n';
  }
  return os.str();
}

double visible_fraction(const BoundingBox& box, const BoundingBox& frame,
                        const std::vector<BoundingBox>& covers) {
  const double full = box.area();
  if (!(full > 0.0)) return 0.0;
  const double l = std::max(box.left, frame.left);
  const double t = std::max(box.top, frame.top);
  const double r = std::min(box.right(), frame.right());
  const double b = std::min(box.bottom(), frame.bottom());
  if (l >= r || t >= b) return 0.0;

  // Clip every cover to the in-frame part, then sum the uncovered cells of
  // the compressed grid.
  std::vector<BoundingBox> clipped;
  std::vector<double> xs{l, r};
  std::vector<double> ys{t, b};
  for (const auto& c : covers) {
    const double cl = std::max(c.left, l);
    const double ct = std::max(c.top, t);
    const double cr = std::min(c.right(), r);
    const double cb = std::min(c.bottom(), b);
    if (cl >= cr || ct >= cb) continue;
    clipped.push_back({cl, ct, cr - cl, cb - ct});
    xs.push_back(cl);
    xs.push_back(cr);
    ys.push_back(ct);
    ys.push_back(cb);
  }
  if (clipped.empty()) {
    if (l == box.left && t == box.top && r == box.right() && b == box.bottom()) return 1.0;
    return std::min(1.0, (r - l) * (b - t) / full);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());

  double visible = 0.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    const double mx = 0.5 * (xs[i] + xs[i + 1]);
    for (std::size_t j = 0; j + 1 < ys.size(); ++j) {
      const double my = 0.5 * (ys[j] + ys[j + 1]);
      const bool covered = std::any_of(clipped.begin(), clipped.end(), [&](const BoundingBox& c) {
        return mx > c.left && mx < c.right() && my > c.top && my < c.bottom();
      });
      if (!covered) visible += (xs[i + 1] - xs[i]) * (ys[j + 1] - ys[j]);
    }
  }
  return std::clamp(visible / full, 0.0, 1.0);
}

Measurement semi_occlusion_noise(const Measurement& z, double visibility, double sigma_a,
                                 double sigma_h, Rng& rng) {
  if (visibility >= 1.0) return z;
  const double occ = 1.0 - std::clamp(visibility, 0.0, 1.0);
  const double eps_a = sigma_a * rng.normal();
  const double eps_h = sigma_h * rng.normal();
  // Keep the box non-degenerate under extreme draws.
  Measurement out = z;
  out(2) = z(2) * std::max(0.05, 1.0 + eps_a * occ);
  out(3) = z(3) * std::max(0.05, 1.0 + eps_h * occ);
  return out;
}

SynthOutput generate(const SceneConfig& cfg) {
  cfg.validate();
  SynthOutput out;
  Rng rng(cfg.seed);
  const BoundingBox frame{0.0, 0.0, cfg.width, cfg.height};

  // Depth order: later spawn in front, ties broken by list position.
  std::vector<std::size_t> depth(cfg.agents.size());
  std::iota(depth.begin(), depth.end(), 0);
  std::stable_sort(depth.begin(), depth.end(), [&](std::size_t a, std::size_t b) {
    return cfg.agents[a].spawn < cfg.agents[b].spawn;
  });
  std::vector<std::size_t> rank(cfg.agents.size());
  for (std::size_t k = 0; k < depth.size(); ++k) rank[depth[k]] = k;

  std::map<std::pair<int, std::int64_t>, double> injected;
  for (const auto& inj : cfg.injections) injected[{inj.agent, inj.frame}] = inj.visibility;

  out.detections.reserve(static_cast<std::size_t>(cfg.frames));
  std::vector<std::size_t> active;
  std::vector<BoundingBox> boxes(cfg.agents.size());
  for (std::int64_t t = 1; t <= cfg.frames; ++t) {
    active.clear();
    for (std::size_t k = 0; k < cfg.agents.size(); ++k) {
      const Agent& a = cfg.agents[k];
      if (t < a.spawn || t > a.despawn) continue;
      boxes[k] = a.box_at(t);
      if (intersection_area(boxes[k], frame) > 0.0) active.push_back(k);
    }

    FrameDetections fd;
    fd.frame = t;
    std::vector<BoundingBox> covers;
    for (const std::size_t k : active) {
      const int id = static_cast<int>(k) + 1;
      out.gt[id][t] = boxes[k];

      covers = cfg.occluders;
      for (const std::size_t o : active) {
        if (rank[o] > rank[k]) covers.push_back(boxes[o]);
      }
      const double vis = visible_fraction(boxes[k], frame, covers);
      out.visibility[id][t] = vis;
      if (vis <= 0.0) continue;

      const bool missed = rng.uniform() < cfg.miss_prob;
      double noise_vis = vis;
      if (const auto it = injected.find({static_cast<int>(k), t}); it != injected.end()) noise_vis = it->second;
      const Measurement z =
          semi_occlusion_noise(box_to_measurement(boxes[k]), noise_vis, cfg.sigma_a, cfg.sigma_h, rng);
      if (missed || vis < cfg.drop_visibility) continue;
      const double conf = std::clamp(cfg.conf_base - cfg.conf_penalty * (1.0 - vis), 0.0, 1.0);
      fd.detections.push_back({measurement_to_box(z), conf});
    }
    out.detections.push_back(std::move(fd));
  }
  return out;
}

namespace scenes {
namespace {

double uniform(Rng& rng, double lo, double hi) { return lo + (hi - lo) * rng.uniform(); }

/// Straight walk from (x0, y) at `spawn` with horizontal speed `vx` until the
/// box has fully left [0, width] or `last` is reached.
Agent walker(std::int64_t spawn, std::int64_t last, double x0, double y, double vx, double vy,
             double w, double h, double frame_w) {
  Agent a;
  a.spawn = spawn;
  a.width = w;
  a.height = h;
  std::int64_t end = last;
  if (vx > 0.0) {
    end = std::min(end, spawn + static_cast<std::int64_t>(std::ceil((frame_w + 0.5 * w - x0) / vx)));
  } else if (vx < 0.0) {
    end = std::min(end, spawn + static_cast<std::int64_t>(std::ceil((x0 + 0.5 * w) / -vx)));
  }
  end = std::max(end, spawn + 1);
  a.despawn = end;
  const double dt = static_cast<double>(end - spawn);
  a.path = {{spawn, x0, y}, {end, x0 + vx * dt, y + vy * dt}};
  return a;
}

}  // namespace

SceneConfig transient_occlusion(std::uint64_t seed) {
  Rng rng(seed ^ 0x7a3f0c11d2e4b965ULL);
  SceneConfig cfg;
  cfg.seed = seed;
  cfg.frames = 600;
  // A dense row of pillars across the lower band.
  for (double x = 200.0; x < 1700.0; x += 60.0) {
    cfg.occluders.push_back({x + uniform(rng, -10.0, 10.0), 620.0, uniform(rng, 32.0, 36.0), 460.0});
  }
  // Wanderers in the upper band pass in front of each other.
  for (int k = 0; k < 20; ++k) {
    Agent a;
    a.spawn = 1;
    a.despawn = cfg.frames;
    a.width = uniform(rng, 34.0, 48.0);
    a.height = a.width * uniform(rng, 2.2, 2.6);
    const double y = uniform(rng, 130.0, 460.0);
    double x = uniform(rng, 100.0, 1800.0);
    for (std::int64_t t = 1;; t += 100) {
      const std::int64_t tt = std::min(t, cfg.frames);
      a.path.push_back({tt, x, y});
      if (tt == cfg.frames) break;
      x = std::clamp(x + uniform(rng, -100.0, 100.0), 60.0, cfg.width - 60.0);
    }
    cfg.agents.push_back(a);
  }
  // One walker behind the pillar row, dropping out every few frames.
  {
    const bool rightward = rng.uniform() < 0.5;
    const double speed = uniform(rng, 5.0, 7.0);
    const double w = uniform(rng, 38.0, 44.0);
    const std::int64_t spawn = 1 + static_cast<std::int64_t>(uniform(rng, 0.0, static_cast<double>(cfg.frames - 150)));
    const double x0 = rightward ? uniform(rng, 20.0, 200.0) : uniform(rng, cfg.width - 200.0, cfg.width - 20.0);
    cfg.agents.push_back(walker(spawn, cfg.frames, x0, uniform(rng, 700.0, 950.0), rightward ? speed : -speed, 0.0,
                                w, w * uniform(rng, 2.2, 2.6), cfg.width));
  }
  return cfg;
}

SceneConfig exit_heavy(std::uint64_t seed) {
  Rng rng(seed ^ 0x1d8e4e27c47d124fULL);
  SceneConfig cfg;
  cfg.seed = seed;
  cfg.frames = 400;
  cfg.occluders.push_back({700.0, 0.0, 60.0, cfg.height});
  for (int k = 0; k < 36; ++k) {
    const std::int64_t spawn = 1 + static_cast<std::int64_t>(uniform(rng, 0.0, 330.0));
    const double speed = uniform(rng, 8.0, 14.0);
    const double w = uniform(rng, 36.0, 50.0);
    const double h = w * uniform(rng, 2.2, 2.8);
    const double y = uniform(rng, 300.0, 500.0);
    const double x0 = uniform(rng, 1100.0, 1500.0);
    cfg.agents.push_back(walker(spawn, cfg.frames, x0, y, speed, uniform(rng, -0.5, 0.5), w, h, cfg.width));
  }
  for (int k = 0; k < 6; ++k) {
    const std::int64_t spawn = 1 + static_cast<std::int64_t>(uniform(rng, 0.0, 200.0));
    const double w = uniform(rng, 36.0, 50.0);
    const double h = w * uniform(rng, 2.2, 2.8);
    const double y = uniform(rng, 650.0, 850.0);
    const double x0 = uniform(rng, 300.0, 500.0);
    const std::int64_t last = std::min<std::int64_t>(cfg.frames, spawn + 120);
    Agent a = walker(spawn, last, x0, y, uniform(rng, 3.0, 5.0), 0.0, w, h, cfg.width);
    cfg.agents.push_back(a);
  }
  return cfg;
}

SceneConfig semi_occlusion(std::uint64_t seed, int occlusion) {
  Rng rng(seed ^ 0x5be0cd19137e2179ULL);
  SceneConfig cfg;
  cfg.seed = seed;
  // Any overlap with the wall drops the detection, so the gap length is
  // exactly `occlusion` frames and the only scale noise is the injected one.
  cfg.drop_visibility = 0.999;
  cfg.sigma_a = 0.4;
  cfg.sigma_h = 0.3;

  const double v = uniform(rng, 6.0, 12.0);
  const double w = uniform(rng, 30.0, 50.0);
  const double h = w * uniform(rng, 2.2, 2.8);
  const double y = uniform(rng, 300.0, 700.0);
  const std::int64_t t1 = 25;  // first hidden frame
  cfg.frames = t1 + occlusion + 15;

  const double wall_left = 800.0;
  // Right edge just clears the wall on t1 - 1 and just overlaps on t1.
  const double x_t1 = wall_left + 0.5 * v - 0.5 * w;
  const double x0 = x_t1 - v * static_cast<double>(t1 - 1);
  const double wall_right = wall_left - w + static_cast<double>(occlusion) * v;
  cfg.occluders.push_back({wall_left, 0.0, wall_right - wall_left, cfg.height});

  Agent a;
  a.spawn = 1;
  a.despawn = cfg.frames;
  a.width = w;
  a.height = h;
  a.path = {{1, x0, y}, {cfg.frames, x0 + v * static_cast<double>(cfg.frames - 1), y}};
  cfg.agents.push_back(a);
  cfg.injections.push_back({0, t1 - 1, uniform(rng, 0.2, 0.6)});
  return cfg;
}

SceneConfig crossing(std::uint64_t seed, int overlap) {
  Rng rng(seed ^ 0x3c6ef372fe94f82bULL);
  SceneConfig cfg;
  cfg.seed = seed;
  cfg.frames = 80;
  const double w = 40.0;
  const double h = 100.0;
  // The rear box drops out while |dx| < (1 - drop) w.
  const double v = (1.0 - cfg.drop_visibility) * w / static_cast<double>(overlap);
  const double y = uniform(rng, 400.0, 600.0);
  const double meet_x = 960.0 + uniform(rng, -100.0, 100.0);
  const double tm = 40.0;
  for (const double dir : {1.0, -1.0}) {
    Agent a;
    a.spawn = 1;
    a.despawn = cfg.frames;
    a.width = w;
    a.height = h;
    const double x0 = meet_x - dir * v * (tm - 1.0);
    a.path = {{1, x0, y + dir * 4.0}, {cfg.frames, x0 + dir * v * static_cast<double>(cfg.frames - 1), y + dir * 4.0}};
    cfg.agents.push_back(a);
  }
  return cfg;
}

SceneConfig crowd(std::uint64_t seed, int agents, std::int64_t frames) {
  Rng rng(seed ^ 0x510e527fade682d1ULL);
  SceneConfig cfg;
  cfg.seed = seed;
  cfg.frames = frames;
  cfg.miss_prob = 0.02;
  for (int k = 0; k < agents; ++k) {
    Agent a;
    a.spawn = 1;
    a.despawn = frames;
    a.width = uniform(rng, 30.0, 70.0);
    a.height = a.width * uniform(rng, 2.0, 3.0);
    for (std::int64_t t = 1;; t += 60 + static_cast<std::int64_t>(uniform(rng, 0.0, 80.0))) {
      const std::int64_t tt = std::min(t, frames);
      a.path.push_back({tt, uniform(rng, 100.0, cfg.width - 100.0), uniform(rng, 150.0, cfg.height - 150.0)});
      if (tt == frames) break;
    }
    cfg.agents.push_back(a);
  }
  return cfg;
}

}  // namespace scenes

}  // namespace meshsort

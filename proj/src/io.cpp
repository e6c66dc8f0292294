#include "meshsort/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "meshsort/errors.hpp"

namespace meshsort {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ',') {
      out.push_back(trim(line.substr(start, i - start)));
      start = i + 1;
    }
  }
  return out;
}

double real_field(std::string_view f, const std::string& source, std::size_t ln) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
  if (f.empty() || ec != std::errc() || p != f.data() + f.size() || !std::isfinite(v)) {
    throw ParseError(source, ln, "non-numeric field '" + std::string(f) + "'");
  }
  return v;
}

long long int_field(std::string_view f, const std::string& source, std::size_t ln) {
  const double v = real_field(f, source, ln);
  if (v != std::floor(v) || std::fabs(v) > 9.0e15) {
    throw ParseError(source, ln, "expected an integer, got '" + std::string(f) + "'");
  }
  return static_cast<long long>(v);
}

/// Calls `fn(fields, line_number)` for every non-blank line.
template <typename Fn>
void for_each_record(std::istream& in, const std::string& source, std::size_t n_fields, Fn fn) {
  std::size_t ln = 0;
  for (std::string line; std::getline(in, line);) {
    ++ln;
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const auto fields = split_fields(body);
    if (fields.size() != n_fields) {
      throw ParseError(source, ln,
                       "expected " + std::to_string(n_fields) + " fields, got " + std::to_string(fields.size()));
    }
    fn(fields, ln);
  }
}

std::int64_t frame_field(std::string_view f, const std::string& source, std::size_t ln) {
  const long long v = int_field(f, source, ln);
  if (v < 1) throw ParseError(source, ln, "frame must be >= 1");
  return v;
}

BoundingBox box_fields(const std::vector<std::string_view>& f, const std::string& source, std::size_t ln) {
  const BoundingBox b{real_field(f[2], source, ln), real_field(f[3], source, ln), real_field(f[4], source, ln),
                      real_field(f[5], source, ln)};
  if (!b.valid()) throw ParseError(source, ln, "box width and height must be positive");
  return b;
}

/// Two-decimal formatting without a negative zero.
void put2(std::string& out, double v) {
  char buf[48];
  int n = std::snprintf(buf, sizeof(buf), "%.2f", v);
  if (std::string_view(buf, static_cast<std::size_t>(n)) == "-0.00") n = std::snprintf(buf, sizeof(buf), "0.00");
  out.append(buf, static_cast<std::size_t>(n));
}

}  // namespace

std::vector<FrameDetections> parse_detections(std::istream& in, const std::string& source) {
  std::map<std::int64_t, std::vector<Detection>> frames;
  for_each_record(in, source, 10, [&](const std::vector<std::string_view>& f, std::size_t ln) {
    const std::int64_t frame = frame_field(f[0], source, ln);
    real_field(f[1], source, ln);
    const BoundingBox b = box_fields(f, source, ln);
    const double conf = real_field(f[6], source, ln);
    for (int k = 7; k < 10; ++k) real_field(f[static_cast<std::size_t>(k)], source, ln);
    frames[frame].push_back({b, conf});
  });
  std::vector<FrameDetections> out;
  out.reserve(frames.size());
  for (auto& [frame, dets] : frames) out.push_back({frame, std::move(dets)});
  return out;
}

Trajectories parse_ground_truth(std::istream& in, const std::string& source, bool keep_all) {
  Trajectories gt;
  for_each_record(in, source, 9, [&](const std::vector<std::string_view>& f, std::size_t ln) {
    const std::int64_t frame = frame_field(f[0], source, ln);
    const long long id = int_field(f[1], source, ln);
    const BoundingBox b = box_fields(f, source, ln);
    const long long flag = int_field(f[6], source, ln);
    const long long cls = int_field(f[7], source, ln);
    real_field(f[8], source, ln);
    if (!keep_all && (flag != 1 || cls != 1)) return;
    if (!gt[static_cast<int>(id)].emplace(frame, b).second) {
      throw ParseError(source, ln, "duplicate id " + std::to_string(id) + " in frame " + std::to_string(frame));
    }
  });
  return gt;
}

Trajectories parse_results(std::istream& in, const std::string& source) {
  Trajectories res;
  for_each_record(in, source, 10, [&](const std::vector<std::string_view>& f, std::size_t ln) {
    const std::int64_t frame = frame_field(f[0], source, ln);
    const long long id = int_field(f[1], source, ln);
    const BoundingBox b = box_fields(f, source, ln);
    for (int k = 6; k < 10; ++k) real_field(f[static_cast<std::size_t>(k)], source, ln);
    if (!res[static_cast<int>(id)].emplace(frame, b).second) {
      throw ParseError(source, ln, "duplicate id " + std::to_string(id) + " in frame " + std::to_string(frame));
    }
  });
  return res;
}

std::string format_results(std::span<const FrameOutput> outputs) {
  struct Row {
    std::int64_t frame;
    const TrackOutput* t;
  };
  std::vector<Row> rows;
  for (const auto& fo : outputs) {
    for (const auto& t : fo.tracks) rows.push_back({fo.frame, &t});
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return a.frame != b.frame ? a.frame < b.frame : a.t->id < b.t->id;
  });
  std::string out;
  out.reserve(rows.size() * 56);
  for (const auto& r : rows) {
    out += std::to_string(r.frame);
    out += ',';
    out += std::to_string(r.t->id);
    for (const double v : {r.t->box.left, r.t->box.top, r.t->box.width, r.t->box.height, r.t->confidence}) {
      out += ',';
      put2(out, v);
    }
    out += ",-1,-1,-1\n";
  }
  return out;
}

std::string format_detections(std::span<const FrameDetections> frames) {
  std::vector<const FrameDetections*> order;
  for (const auto& fd : frames) order.push_back(&fd);
  std::stable_sort(order.begin(), order.end(), [](auto* a, auto* b) { return a->frame < b->frame; });
  std::string out;
  for (const auto* fd : order) {
    for (const auto& d : fd->detections) {
      out += std::to_string(fd->frame);
      out += ",-1";
      for (const double v : {d.box.left, d.box.top, d.box.width, d.box.height, d.confidence}) {
        out += ',';
        put2(out, v);
      }
      out += ",-1,-1,-1\n";
    }
  }
  return out;
}

std::string format_ground_truth(const Trajectories& gt,
                                const std::map<int, std::map<std::int64_t, double>>& visibility) {
  std::map<std::int64_t, std::vector<std::pair<int, BoundingBox>>> frames;
  for (const auto& [id, boxes] : gt) {
    for (const auto& [f, b] : boxes) frames[f].emplace_back(id, b);
  }
  std::string out;
  for (const auto& [f, rows] : frames) {
    for (const auto& [id, b] : rows) {
      double vis = 1.0;
      if (const auto it = visibility.find(id); it != visibility.end()) {
        if (const auto jt = it->second.find(f); jt != it->second.end()) vis = jt->second;
      }
      out += std::to_string(f);
      out += ',';
      out += std::to_string(id);
      for (const double v : {b.left, b.top, b.width, b.height}) {
        out += ',';
        put2(out, v);
      }
      out += ",1,1,";
      put2(out, vis);
      out += '\n';
    }
  }
  return out;
}

std::vector<FrameDetections> fill_frame_gaps(std::span<const FrameDetections> frames) {
  std::vector<FrameDetections> out;
  std::int64_t next = 1;
  for (const auto& fd : frames) {
    for (; next < fd.frame; ++next) out.push_back({next, {}});
    out.push_back(fd);
    next = fd.frame + 1;
  }
  return out;
}

namespace {

bool parse_bool(const std::string& v, const std::string& key) {
  if (v == "true" || v == "1" || v == "on" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "off" || v == "no") return false;
  throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

double parse_real(const std::string& v, const std::string& key) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(key + ": expected a number, got '" + v + "'");
  }
  return x;
}

int parse_int(const std::string& v, const std::string& key) {
  int x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (v.empty() || ec != std::errc() || p != v.data() + v.size()) {
    throw ConfigError(key + ": expected an integer, got '" + v + "'");
  }
  return x;
}

// Shortest text that reads back to the same double.
std::string g17(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

}  // namespace

void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& value) {
  TrackerConfig& t = cfg.tracker;
  const std::string& k = key;
  const std::string& v = value;
  if (k == "lm_buffer") t.lifecycle.lm_buffer = parse_int(v, k);
  else if (k == "max_age") t.lifecycle.max_age = parse_int(v, k);
  else if (k == "eta") t.lifecycle.eta = parse_int(v, k);
  else if (k == "min_hits") t.lifecycle.min_hits = parse_int(v, k);
  else if (k == "occlusion_iou") t.lifecycle.occlusion_iou = parse_real(v, k);
  else if (k == "conf_high") t.association.conf_high = parse_real(v, k);
  else if (k == "conf_low") t.association.conf_low = parse_real(v, k);
  else if (k == "gate_stage1") t.association.gate_stage1 = parse_real(v, k);
  else if (k == "gate_stage2") t.association.gate_stage2 = parse_real(v, k);
  else if (k == "buffer_scale") t.association.buffer_scale = parse_real(v, k);
  else if (k == "init_thresh") t.init_thresh = parse_real(v, k);
  else if (k == "frame_width") t.frame_width = parse_real(v, k);
  else if (k == "frame_height") t.frame_height = parse_real(v, k);
  else if (k == "mesh_m") t.mesh_m = parse_int(v, k);
  else if (k == "mesh_n") t.mesh_n = parse_int(v, k);
  else if (k == "lambda") t.lambda = parse_real(v, k);
  else if (k == "mesh_refresh_interval") t.mesh_refresh_interval = parse_int(v, k);
  else if (k == "vel_buffer") t.vel_buffer = parse_int(v, k);
  else if (k == "vel_rollback") {
    if (v == "oldest") t.vel_rollback = RollbackMode::Oldest;
    else if (v == "mean") t.vel_rollback = RollbackMode::Mean;
    else throw ConfigError(k + ": expected 'oldest' or 'mean'");
  } else if (k == "zero_size_rate") t.zero_size_rate = parse_bool(v, k);
  else if (k == "noise_position") t.noise.position = parse_real(v, k);
  else if (k == "noise_velocity") t.noise.velocity = parse_real(v, k);
  else if (k == "lm_noise_scale") t.lm_noise_scale = parse_real(v, k);
  else if (k == "lm_region_rule") {
    if (v == "prose") t.lm_region_rule = LmRegionRule::Prose;
    else if (v == "pseudocode") t.lm_region_rule = LmRegionRule::Pseudocode;
    else throw ConfigError(k + ": expected 'prose' or 'pseudocode'");
  } else if (k == "use_mesh") t.use_mesh = parse_bool(v, k);
  else if (k == "use_lost_maintain") t.use_lost_maintain = parse_bool(v, k);
  else if (k == "use_vel_buffer") t.use_vel_buffer = parse_bool(v, k);
  else if (k == "use_location_ages") t.use_location_ages = parse_bool(v, k);
  else if (k == "emit_virtual") t.emit_virtual = parse_bool(v, k);
  else if (k == "dets") cfg.dets = v;
  else if (k == "out") cfg.out = v;
  else throw ConfigError("unknown config key '" + k + "'");
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig cfg;
  std::size_t ln = 0;
  for (std::string line; std::getline(in, line);) {
    ++ln;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string_view body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = source + ":" + std::to_string(ln) + ": ";
    if (eq == std::string_view::npos) throw ConfigError(where + "expected 'key = value'");
    const std::string key(trim(body.substr(0, eq)));
    const std::string value(trim(body.substr(eq + 1)));
    try {
      apply_config_key(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + e.what());
    }
  }
  cfg.tracker.validate();
  return cfg;
}

std::string format_config(const RunConfig& cfg) {
  const TrackerConfig& t = cfg.tracker;
  auto b = [](bool x) { return x ? "true" : "false"; };
  std::ostringstream os;
  os << "lm_buffer = " << t.lifecycle.lm_buffer << '\n'
     << "max_age = " << t.lifecycle.max_age << '\n'
     << "eta = " << t.lifecycle.eta << '\n'
     << "min_hits = " << t.lifecycle.min_hits << '\n'
     << "occlusion_iou = " << g17(t.lifecycle.occlusion_iou) << '\n'
     << "conf_high = " << g17(t.association.conf_high) << '\n'
     << "conf_low = " << g17(t.association.conf_low) << '\n'
     << "gate_stage1 = " << g17(t.association.gate_stage1) << '\n'
     << "gate_stage2 = " << g17(t.association.gate_stage2) << '\n'
     << "buffer_scale = " << g17(t.association.buffer_scale) << '\n'
     << "init_thresh = " << g17(t.init_thresh) << '\n'
     << "frame_width = " << g17(t.frame_width) << '\n'
     << "frame_height = " << g17(t.frame_height) << '\n'
     << "mesh_m = " << t.mesh_m << '\n'
     << "mesh_n = " << t.mesh_n << '\n'
     << "lambda = " << g17(t.lambda) << '\n'
     << "mesh_refresh_interval = " << t.mesh_refresh_interval << '\n'
     << "vel_buffer = " << t.vel_buffer << '\n'
     << "vel_rollback = " << (t.vel_rollback == RollbackMode::Oldest ? "oldest" : "mean") << '\n'
     << "zero_size_rate = " << b(t.zero_size_rate) << '\n'
     << "noise_position = " << g17(t.noise.position) << '\n'
     << "noise_velocity = " << g17(t.noise.velocity) << '\n'
     << "lm_noise_scale = " << g17(t.lm_noise_scale) << '\n'
     << "lm_region_rule = " << (t.lm_region_rule == LmRegionRule::Prose ? "prose" : "pseudocode") << '\n'
     << "use_mesh = " << b(t.use_mesh) << '\n'
     << "use_lost_maintain = " << b(t.use_lost_maintain) << '\n'
     << "use_vel_buffer = " << b(t.use_vel_buffer) << '\n'
     << "use_location_ages = " << b(t.use_location_ages) << '\n'
     << "emit_virtual = " << b(t.emit_virtual) << '\n';
  if (!cfg.dets.empty()) os << "dets = " << cfg.dets << '\n';
  if (!cfg.out.empty()) os << "out = " << cfg.out << '\n';
  return os.str();
}

}  // namespace meshsort

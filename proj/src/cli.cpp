#include "meshsort/cli.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "meshsort/errors.hpp"
#include "meshsort/io.hpp"
#include "meshsort/metrics.hpp"
#include "meshsort/synth.hpp"
#include "meshsort/tracker.hpp"

namespace meshsort {
namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& data) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << data;
  if (!out.flush()) throw Error("write failed for '" + path + "'");
}

RunConfig load_config(const std::string& path) {
  if (path.empty()) return {};
  std::istringstream in(read_file(path));
  return parse_config(in, path);
}

std::vector<FrameDetections> load_detections(const std::string& path) {
  std::istringstream in(read_file(path));
  return fill_frame_gaps(parse_detections(in, path));
}

bool is_scene_path(const std::string& path) {
  return path.size() >= 6 && path.compare(path.size() - 6, 6, ".scene") == 0;
}

SceneConfig preset_scene(const std::string& name, std::uint64_t seed, int agents, std::int64_t frames) {
  if (name == "transient") return scenes::transient_occlusion(seed);
  if (name == "exit") return scenes::exit_heavy(seed);
  if (name == "semi") return scenes::semi_occlusion(seed);
  if (name == "crossing") return scenes::crossing(seed);
  if (name == "crowd") return scenes::crowd(seed, agents, frames);
  throw Error("unknown preset '" + name + "'");
}

/// Detections plus optional ground truth for one input of ablate/bench.
struct Input {
  std::vector<FrameDetections> dets;
  std::optional<Trajectories> gt;
};

Input load_input(const std::string& path, const std::string& gt_path) {
  Input in;
  if (is_scene_path(path)) {
    auto s = generate(parse_scene(read_file(path), path));
    in.dets = std::move(s.detections);
    in.gt = std::move(s.gt);
  } else {
    in.dets = load_detections(path);
  }
  if (!gt_path.empty()) {
    std::istringstream g(read_file(gt_path));
    in.gt = parse_ground_truth(g, gt_path);
  }
  return in;
}

struct GridAxis {
  std::string key;
  std::vector<std::string> values;
};

/// `key=v1,v2;key2=v3,...`. `mesh=MxN` sets both mesh dimensions.
std::vector<GridAxis> parse_grid(const std::string& spec) {
  std::vector<GridAxis> axes;
  std::stringstream ss(spec);
  for (std::string part; std::getline(ss, part, ';');) {
    part.erase(std::remove(part.begin(), part.end(), ' '), part.end());
    if (part.empty()) continue;
    const auto eq = part.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == part.size()) {
      throw ConfigError("grid entry '" + part + "' is not key=v1,v2,...");
    }
    GridAxis axis{part.substr(0, eq), {}};
    std::stringstream vs(part.substr(eq + 1));
    for (std::string v; std::getline(vs, v, ',');) {
      if (!v.empty()) axis.values.push_back(v);
    }
    if (axis.values.empty()) throw ConfigError("grid entry '" + part + "' has no values");
    axes.push_back(std::move(axis));
  }
  if (axes.empty()) throw ConfigError("empty grid");
  return axes;
}

void apply_grid_value(RunConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "mesh") {
    const auto x = value.find('x');
    if (x == std::string::npos) throw ConfigError("mesh: expected MxN, got '" + value + "'");
    apply_config_key(cfg, "mesh_m", value.substr(0, x));
    apply_config_key(cfg, "mesh_n", value.substr(x + 1));
    return;
  }
  apply_config_key(cfg, key, value);
}

unsigned worker_count(std::size_t jobs) {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MESH_SORT_THREADS")) {
    const int cap = std::atoi(env);
    if (cap >= 1) n = std::min(n, static_cast<unsigned>(cap));
  }
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

struct AblateRow {
  std::vector<std::string> values;
  std::optional<MetricsReport> report;
  TrackerStats stats;
};

std::string ablate_table(const std::vector<GridAxis>& axes, const std::vector<AblateRow>& rows) {
  std::vector<std::string> header;
  for (const auto& a : axes) header.push_back(a.key);
  const bool metrics = !rows.empty() && rows.front().report.has_value();
  if (metrics) {
    for (const char* h : {"MOTA", "IDF1", "HOTA", "FP", "FN", "IDSW", "FM", "MT", "ML"}) header.emplace_back(h);
  }
  header.emplace_back("predicts");
  header.emplace_back("doomed");

  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    std::vector<std::string> c = r.values;
    char buf[32];
    if (r.report) {
      const auto& m = *r.report;
      for (const double v : {m.clear.mota, m.idf1, m.hota.hota}) {
        std::snprintf(buf, sizeof(buf), "%.2f", 100.0 * v);
        c.emplace_back(buf);
      }
      for (const auto v : {m.clear.fp, m.clear.fn, m.clear.idsw, m.clear.fm, m.clear.mt, m.clear.ml}) {
        c.push_back(std::to_string(v));
      }
    }
    c.push_back(std::to_string(r.stats.predicts));
    c.push_back(std::to_string(r.stats.doomed_predicts));
    cells.push_back(std::move(c));
  }

  std::vector<std::size_t> width(header.size());
  for (std::size_t k = 0; k < header.size(); ++k) {
    width[k] = header[k].size();
    for (const auto& c : cells) width[k] = std::max(width[k], c[k].size());
  }
  std::string out;
  auto put_row = [&](const std::vector<std::string>& row) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += "  ";
      out += std::string(width[k] - row[k].size(), ' ');
      out += row[k];
    }
    out += '\n';
  };
  put_row(header);
  for (const auto& c : cells) put_row(c);
  return out;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Online multi-object tracker with mesh-based lost-track management", "meshsort"};
  app.require_subcommand(1);

  std::string config_path, dets_path, out_path, gt_path, res_path, scene_path, out_gt, out_dets, grid, input;
  std::string preset, out_scene;
  bool emit_virtual = true;
  bool emit_virtual_set = false;
  bool kv = false;
  double iou_thr = 0.5;
  std::uint64_t seed = 1;
  int agents = 30;
  std::int64_t frames = 1000;
  int repeat = 1;

  auto* track = app.add_subcommand("track", "Run the tracker over a detection file");
  track->add_option("--config", config_path, "Tracker config file (key = value)");
  track->add_option("--dets", dets_path, "Detections in MOT format");
  track->add_option("--out", out_path, "Result file to write");
  track->add_flag_callback(
      "--emit-virtual", [&] { emit_virtual = true, emit_virtual_set = true; },
      "Report lost-maintained tracks with predicted boxes (default)");
  track->add_flag_callback(
      "--no-emit-virtual", [&] { emit_virtual = false, emit_virtual_set = true; },
      "Only report tracks matched in the current frame");

  auto* eval = app.add_subcommand("eval", "Score a result file against ground truth");
  eval->add_option("--gt", gt_path, "Ground truth (9-field MOT format)")->required();
  eval->add_option("--res", res_path, "Tracker results")->required();
  eval->add_option("--iou", iou_thr, "IoU threshold for CLEAR-MOT and IDF1")->check(CLI::Range(0.0, 1.0));
  eval->add_flag("--kv", kv, "Print metric=value lines instead of a table");

  auto* synth = app.add_subcommand("synth", "Generate a synthetic scene");
  auto* scene_opt = synth->add_option("--scene", scene_path, "Scene description file");
  synth->add_option("--preset", preset, "transient | exit | semi | crossing | crowd")->excludes(scene_opt);
  synth->add_option("--seed", seed, "Seed for --preset");
  synth->add_option("--agents", agents, "Agents for the crowd preset");
  synth->add_option("--frames", frames, "Frames for the crowd preset");
  synth->add_option("--out-gt", out_gt, "Ground truth file to write")->required();
  synth->add_option("--out-dets", out_dets, "Detection file to write")->required();
  synth->add_option("--out-scene", out_scene, "Also write the scene description");

  auto* ablate = app.add_subcommand("ablate", "Sweep config values and tabulate the metrics");
  ablate->add_option("--config", config_path, "Base config");
  ablate->add_option("--grid", grid, "e.g. 'lm_buffer=0,3;mesh=2x2,4x4'")->required();
  ablate->add_option("--dets-or-scene", input, "Detection file, or a .scene file")->required();
  ablate->add_option("--gt", gt_path, "Ground truth for a detection file");
  ablate->add_option("--out", out_path, "Table file to write")->required();

  auto* bench = app.add_subcommand("bench", "Measure tracker throughput");
  bench->add_option("--config", config_path, "Tracker config");
  bench->add_option("--dets-or-scene", input, "Detection file or .scene file (default: crowd preset)");
  bench->add_option("--seed", seed, "Seed for the crowd preset");
  bench->add_option("--agents", agents, "Agents for the crowd preset");
  bench->add_option("--frames", frames, "Frames for the crowd preset");
  bench->add_option("--repeat", repeat, "Timed runs; the best is reported")->check(CLI::PositiveNumber);

  std::vector<const char*> argv{"meshsort"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*track) {
      RunConfig cfg = load_config(config_path);
      if (!dets_path.empty()) cfg.dets = dets_path;
      if (!out_path.empty()) cfg.out = out_path;
      if (emit_virtual_set) cfg.tracker.emit_virtual = emit_virtual;
      if (cfg.dets.empty() || cfg.out.empty()) {
        err << "error: track needs --dets and --out (or dets/out in the config)\n";
        return 2;
      }
      const auto dets = load_detections(cfg.dets);
      write_file(cfg.out, format_results(run(cfg.tracker, dets)));
    } else if (*eval) {
      std::istringstream g(read_file(gt_path));
      std::istringstream r(read_file(res_path));
      const auto report = evaluate(parse_ground_truth(g, gt_path), parse_results(r, res_path), iou_thr);
      out << (kv ? report.key_values() : report.table());
    } else if (*synth) {
      if (scene_path.empty() == preset.empty()) {
        err << "error: synth needs exactly one of --scene or --preset\n";
        return 2;
      }
      const SceneConfig sc = scene_path.empty() ? preset_scene(preset, seed, agents, frames)
                                                : parse_scene(read_file(scene_path), scene_path);
      const auto s = generate(sc);
      write_file(out_gt, format_ground_truth(s.gt, s.visibility));
      write_file(out_dets, format_detections(s.detections));
      if (!out_scene.empty()) write_file(out_scene, format_scene(sc));
    } else if (*ablate) {
      const RunConfig base = load_config(config_path);
      const auto axes = parse_grid(grid);
      const Input data = load_input(input, gt_path);

      std::vector<RunConfig> cfgs(1, base);
      std::vector<std::vector<std::string>> labels(1);
      for (const auto& axis : axes) {
        std::vector<RunConfig> next_cfgs;
        std::vector<std::vector<std::string>> next_labels;
        for (std::size_t c = 0; c < cfgs.size(); ++c) {
          for (const auto& v : axis.values) {
            RunConfig rc = cfgs[c];
            apply_grid_value(rc, axis.key, v);
            next_cfgs.push_back(std::move(rc));
            next_labels.push_back(labels[c]);
            next_labels.back().push_back(v);
          }
        }
        cfgs = std::move(next_cfgs);
        labels = std::move(next_labels);
      }
      for (const auto& c : cfgs) c.tracker.validate();

      std::vector<AblateRow> rows(cfgs.size());
      std::atomic<std::size_t> next{0};
      std::vector<std::exception_ptr> failures(cfgs.size());
      auto work = [&] {
        for (std::size_t i = next++; i < cfgs.size(); i = next++) {
          try {
            Tracker tracker(cfgs[i].tracker);
            std::vector<FrameOutput> outputs;
            outputs.reserve(data.dets.size());
            for (const auto& fd : data.dets) outputs.push_back(tracker.step(fd));
            rows[i].values = labels[i];
            rows[i].stats = tracker.stats();
            if (data.gt) rows[i].report = evaluate(*data.gt, trajectories_from_outputs(outputs));
          } catch (...) {
            failures[i] = std::current_exception();
          }
        }
      };
      std::vector<std::thread> pool;
      const unsigned n_workers = worker_count(cfgs.size());
      for (unsigned w = 1; w < n_workers; ++w) pool.emplace_back(work);
      work();
      for (auto& t : pool) t.join();
      for (const auto& f : failures) {
        if (f) std::rethrow_exception(f);
      }
      write_file(out_path, ablate_table(axes, rows));
    } else if (*bench) {
      const RunConfig cfg = load_config(config_path);
      const std::vector<FrameDetections> dets =
          input.empty() ? generate(scenes::crowd(seed, agents, frames)).detections : load_input(input, "").dets;
      double best = 0.0;
      std::size_t n_tracks = 0;
      for (int r = 0; r < repeat; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        const auto outputs = run(cfg.tracker, dets);
        const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (r == 0 || s < best) best = s;
        n_tracks = trajectories_from_outputs(outputs).size();
      }
      char buf[160];
      std::snprintf(buf, sizeof(buf), "frames=%zu\nseconds=%.6f\nfps=%.1f\ntracks=%zu\n", dets.size(), best,
                    best > 0.0 ? static_cast<double>(dets.size()) / best : 0.0, n_tracks);
      out << buf;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace meshsort

#include <sstream>

#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "meshsort/assignment.hpp"
#include "meshsort/errors.hpp"
#include "meshsort/io.hpp"
#include "meshsort/kalman.hpp"
#include "meshsort/mesh.hpp"
#include "meshsort/metrics.hpp"
#include "meshsort/synth.hpp"
#include "meshsort/tracker.hpp"

namespace py = pybind11;
using namespace meshsort;

namespace {

SceneConfig preset_scene(const std::string& name, std::uint64_t seed, int agents, std::int64_t frames) {
  if (name == "transient") return scenes::transient_occlusion(seed);
  if (name == "exit") return scenes::exit_heavy(seed);
  if (name == "semi") return scenes::semi_occlusion(seed);
  if (name == "crossing") return scenes::crossing(seed);
  if (name == "crowd") return scenes::crowd(seed, agents, frames);
  throw ConfigError("unknown preset: " + name);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mesh-based multi-object tracking core";

  auto base = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<SequenceError>(m, "SequenceError", base.ptr());
  py::register_exception<MetricError>(m, "MetricError", base.ptr());
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<ParseError>(m, "ParseError", base.ptr());

  py::class_<BoundingBox>(m, "BoundingBox")
      .def(py::init<>())
      .def(py::init([](double l, double t, double w, double h) { return BoundingBox{l, t, w, h}; }),
           py::arg("left"), py::arg("top"), py::arg("width"), py::arg("height"))
      .def_readwrite("left", &BoundingBox::left)
      .def_readwrite("top", &BoundingBox::top)
      .def_readwrite("width", &BoundingBox::width)
      .def_readwrite("height", &BoundingBox::height)
      .def("area", &BoundingBox::area)
      .def(py::self == py::self)
      .def("__repr__", [](const BoundingBox& b) {
        std::ostringstream s;
        s << "BoundingBox(" << b.left << ", " << b.top << ", " << b.width << ", " << b.height << ")";
        return s.str();
      });

  m.def("iou", &iou, py::arg("a"), py::arg("b"));
  m.def("buffered_iou", &buffered_iou, py::arg("a"), py::arg("b"), py::arg("buffer_scale"));
  m.def("box_to_measurement", &box_to_measurement);
  m.def("measurement_to_box", &measurement_to_box);

  py::class_<MotionModel>(m, "MotionModel")
      .def(py::init([](double position, double velocity) { return MotionModel(NoiseWeights{position, velocity}); }),
           py::arg("position") = 1.0 / 20.0, py::arg("velocity") = 1.0 / 160.0)
      .def_property_readonly("transition", &MotionModel::transition)
      .def_property_readonly("observation", &MotionModel::observation);

  py::class_<KalmanTrackState>(m, "KalmanTrackState")
      .def(py::init<>())
      .def_readwrite("mean", &KalmanTrackState::mean)
      .def_readwrite("covariance", &KalmanTrackState::covariance);

  m.def("initiate", &initiate, py::arg("z"), py::arg("model"));
  m.def("predict", &predict, py::arg("state"), py::arg("model"));
  m.def("update", &update, py::arg("state"), py::arg("z"), py::arg("model"), py::arg("noise_scale") = 1.0);

  m.def(
      "assign",
      [](const Eigen::MatrixXd& cost, double gate) { return assign(CostMatrix{cost, gate}).matches; },
      py::arg("cost"), py::arg("gate"), "Gated minimum-cost matching as a list of (row, col).");

  py::class_<MeshGrid>(m, "MeshGrid")
      .def(py::init<int, int, double, double>(), py::arg("m"), py::arg("n"), py::arg("frame_width"),
           py::arg("frame_height"))
      .def("cell_of", [](const MeshGrid& g, double x, double y) {
        const CellId c = g.cell_of({x, y});
        return std::pair{c.i, c.j};
      })
      .def("record_lost", [](MeshGrid& g, double x, double y) {
        const CellId c = g.record_lost({x, y});
        return std::pair{c.i, c.j};
      })
      .def("record_refound", [](MeshGrid& g, double x, double y) {
        const CellId c = g.record_refound({x, y});
        return std::pair{c.i, c.j};
      })
      .def("count", [](const MeshGrid& g, int i, int j) { return g.count({i, j}); })
      .def("identify", [](MeshGrid& g, double lambda, double t) {
        std::vector<std::pair<int, int>> out;
        for (const CellId& c : g.identify({lambda}, t)) out.emplace_back(c.i, c.j);
        return out;
      }, py::arg("lambda_"), py::arg("t"))
      .def("snapshot", [](const MeshGrid& g, std::int64_t frame) { return g.snapshot(frame).serialize(); });

  py::class_<Detection>(m, "Detection")
      .def(py::init([](const BoundingBox& b, double c) { return Detection{b, c}; }), py::arg("box"),
           py::arg("confidence") = 1.0)
      .def_readwrite("box", &Detection::box)
      .def_readwrite("confidence", &Detection::confidence);

  py::class_<FrameDetections>(m, "FrameDetections")
      .def(py::init([](std::int64_t f, std::vector<Detection> d) { return FrameDetections{f, std::move(d)}; }),
           py::arg("frame"), py::arg("detections") = std::vector<Detection>{})
      .def_readwrite("frame", &FrameDetections::frame)
      .def_readwrite("detections", &FrameDetections::detections);

  py::class_<TrackOutput>(m, "TrackOutput")
      .def_readonly("id", &TrackOutput::id)
      .def_readonly("box", &TrackOutput::box)
      .def_readonly("confidence", &TrackOutput::confidence)
      .def_readonly("is_virtual", &TrackOutput::is_virtual);

  py::class_<FrameOutput>(m, "FrameOutput")
      .def_readonly("frame", &FrameOutput::frame)
      .def_readonly("tracks", &FrameOutput::tracks)
      .def(py::self == py::self);

  py::class_<TrackerConfig>(m, "TrackerConfig")
      .def(py::init<>())
      .def("set", [](TrackerConfig& c, const std::string& key, const std::string& value) {
        RunConfig rc{c, {}, {}};
        apply_config_key(rc, key, value);
        c = rc.tracker;
      }, py::arg("key"), py::arg("value"), "Sets one config-file key.")
      .def("with_features_off", &TrackerConfig::with_features_off)
      .def("validate", &TrackerConfig::validate)
      .def("__str__", [](const TrackerConfig& c) { return format_config(RunConfig{c, {}, {}}); });

  py::class_<TrackerStats>(m, "TrackerStats")
      .def_readonly("frames", &TrackerStats::frames)
      .def_readonly("predicts", &TrackerStats::predicts)
      .def_readonly("doomed_predicts", &TrackerStats::doomed_predicts)
      .def_readonly("tracks_created", &TrackerStats::tracks_created);

  py::class_<Tracker>(m, "Tracker")
      .def(py::init<TrackerConfig>(), py::arg("config") = TrackerConfig{})
      .def("step", &Tracker::step, py::arg("frame"))
      .def("stats", &Tracker::stats)
      .def("mesh_snapshot", [](const Tracker& t, std::int64_t frame) -> py::object {
        if (t.mesh() == nullptr) return py::none();
        return py::str(t.mesh()->snapshot(frame).serialize());
      });

  m.def("run", [](const TrackerConfig& c, const std::vector<FrameDetections>& f) { return run(c, f); });
  m.def("run_baseline", [](const TrackerConfig& c, const std::vector<FrameDetections>& f) {
    return run_baseline(c, f);
  });

  py::class_<ClearMot>(m, "ClearMot")
      .def_readonly("mota", &ClearMot::mota)
      .def_readonly("fp", &ClearMot::fp)
      .def_readonly("fn", &ClearMot::fn)
      .def_readonly("idsw", &ClearMot::idsw)
      .def_readonly("fm", &ClearMot::fm)
      .def_readonly("mt", &ClearMot::mt)
      .def_readonly("pt", &ClearMot::pt)
      .def_readonly("ml", &ClearMot::ml);

  py::class_<Hota>(m, "Hota")
      .def_readonly("hota", &Hota::hota)
      .def_readonly("deta", &Hota::deta)
      .def_readonly("assa", &Hota::assa);

  py::class_<MetricsReport>(m, "MetricsReport")
      .def_readonly("clear", &MetricsReport::clear)
      .def_readonly("idf1", &MetricsReport::idf1)
      .def_readonly("hota", &MetricsReport::hota)
      .def("table", &MetricsReport::table)
      .def("__str__", &MetricsReport::key_values);

  m.def("evaluate", &evaluate, py::arg("gt"), py::arg("res"), py::arg("iou_thr") = 0.5,
        "Trajectories are dicts id -> {frame: BoundingBox}.");
  m.def("trajectories", [](const std::vector<FrameOutput>& o) { return trajectories_from_outputs(o); });

  py::class_<SceneConfig>(m, "SceneConfig")
      .def_readwrite("frames", &SceneConfig::frames)
      .def_readwrite("seed", &SceneConfig::seed)
      .def("__str__", &format_scene);

  py::class_<SynthOutput>(m, "SynthOutput")
      .def_readonly("gt", &SynthOutput::gt)
      .def_readonly("detections", &SynthOutput::detections);

  m.def("preset", &preset_scene, py::arg("name"), py::arg("seed") = 1, py::arg("agents") = 30,
        py::arg("frames") = 1000, "transient | exit | semi | crossing | crowd");
  m.def("parse_scene", [](const std::string& text) { return parse_scene(text); });
  m.def("generate", &generate, py::arg("scene"));

  m.def("parse_detections", [](const std::string& text) {
    std::istringstream in(text);
    return parse_detections(in);
  });
  m.def("parse_results", [](const std::string& text) {
    std::istringstream in(text);
    return parse_results(in);
  });
  m.def("parse_config", [](const std::string& text) {
    std::istringstream in(text);
    return parse_config(in).tracker;
  });
  m.def("format_results", [](const std::vector<FrameOutput>& o) { return format_results(o); });
  m.def("format_detections", [](const std::vector<FrameDetections>& f) { return format_detections(f); });
}

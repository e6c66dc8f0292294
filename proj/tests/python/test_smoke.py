import pytest

import meshsort as ms


def test_geometry():
    a = ms.BoundingBox(0, 0, 10, 10)
    b = ms.BoundingBox(5, 0, 10, 10)
    assert ms.iou(a, a) == pytest.approx(1.0)
    assert ms.iou(a, b) == pytest.approx(1 / 3)
    assert ms.buffered_iou(a, b, 0.0) == pytest.approx(ms.iou(a, b))


def test_kalman_and_assignment():
    model = ms.MotionModel()
    s = ms.initiate([5.0, 5.0, 100.0, 1.0], model)
    s = ms.predict(s, model)
    s = ms.update(s, [6.0, 5.0, 100.0, 1.0], model)
    assert s.covariance.shape == (8, 8)
    assert ms.assign([[0.1, 0.9], [0.9, 0.1]], 0.8) == [(0, 0), (1, 1)]


def test_mesh():
    g = ms.MeshGrid(4, 4, 1920, 1080)
    assert g.cell_of(960, 540) == (2, 2)
    for _ in range(3):
        g.record_lost(10, 10)
    assert g.identify(0.02, 100) == [(0, 0)]


def test_synth_track_eval():
    syn = ms.generate(ms.preset("crossing", seed=2))
    out = ms.run(ms.TrackerConfig(), syn.detections)
    assert len(out) == len(syn.detections)
    report = ms.evaluate(syn.gt, ms.trajectories(out))
    assert report.clear.mota > 0.5
    assert 0.0 < report.hota.hota <= 1.0
    text = ms.format_results(out)
    assert ms.parse_results(text).keys() == ms.trajectories(out).keys()


def test_config_and_errors():
    cfg = ms.parse_config("lm_buffer = 0\nuse_mesh = false\n")
    off = cfg.with_features_off()
    syn = ms.generate(ms.preset("crowd", seed=1, agents=5, frames=80))
    assert ms.run(off, syn.detections) == ms.run_baseline(off, syn.detections)
    with pytest.raises(ms.ConfigError):
        cfg.set("bogus", "1")
    with pytest.raises(ms.ParseError):
        ms.parse_detections("1,2,3\n")
    t = ms.Tracker()
    t.step(ms.FrameDetections(2))
    with pytest.raises(ms.SequenceError):
        t.step(ms.FrameDetections(1))
    with pytest.raises(ms.MetricError):
        ms.evaluate({}, {})

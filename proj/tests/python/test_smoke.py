import math

import numpy as np
import pytest

import har


def test_dft_matches_numpy():
    rng = np.random.default_rng(0)
    x = rng.normal(size=37)
    ours = np.array(har.dft(x))
    ref = np.fft.fft(x, 64)
    assert ours.shape == ref.shape
    assert np.allclose(ours, ref, atol=1e-9)


def test_dct_matches_scipy():
    scipy_fft = pytest.importorskip("scipy.fft")
    x = np.linspace(-1.0, 2.0, 20) ** 2
    # scipy's unnormalised DCT-II carries an extra factor of 2
    assert np.allclose(har.dct2(x, 5), scipy_fft.dct(x, type=2)[:5] / 2, atol=1e-9)


def test_time_features():
    f = har.time_features(np.array([1.0, 2.0, 3.0, 4.0, 5.0]))
    assert f["mean"] == pytest.approx(3.0)
    assert f["p50"] == pytest.approx(3.0)
    assert f["entropy"] == pytest.approx(math.log(5))


def test_metrics_match_sklearn():
    metrics = pytest.importorskip("sklearn.metrics")
    rng = np.random.default_rng(1)
    t = rng.integers(0, 4, size=60).tolist()
    p = rng.integers(0, 4, size=60).tolist()
    assert har.accuracy(t, p) == pytest.approx(metrics.accuracy_score(t, p))
    kw = dict(average="macro", zero_division=0)
    assert har.macro_precision(t, p) == pytest.approx(metrics.precision_score(t, p, **kw))
    assert har.macro_recall(t, p) == pytest.approx(metrics.recall_score(t, p, **kw))
    assert har.macro_fscore(t, p) == pytest.approx(metrics.f1_score(t, p, **kw))


def test_confidence_interval_matches_scipy():
    stats = pytest.importorskip("scipy.stats")
    v = [0.91, 0.95, 0.88, 0.97, 0.93]
    lo, hi = har.confidence_interval(v, 0.9)
    ref = stats.t.interval(0.9, len(v) - 1, loc=np.mean(v), scale=stats.sem(v))
    assert (lo, hi) == pytest.approx(ref)


def test_votes():
    assert har.hard_vote([1, 2, 2]) == 2
    assert har.hard_vote([1, 2, 3], "majority", "abstain") is None
    label, scores = har.soft_vote([[0.6, 0.4], [0.3, 0.7]], "product")
    assert label == 1
    assert scores == pytest.approx([0.18, 0.28])


def test_learners_fit_blobs():
    rng = np.random.default_rng(2)
    centers = np.array([[3.0, 3.0], [-3.0, -3.0], [3.0, -3.0]])
    x = np.vstack([c + 0.5 * rng.normal(size=(30, 2)) for c in centers])
    y = [1] * 30 + [2] * 30 + [3] * 30
    for spec in [{"kind": "logreg"}, {"kind": "gnb"}, {"kind": "knn", "k": 3}, {"kind": "cart"},
                 {"kind": "rforest", "n_trees": 10}]:
        model = har.train(spec, x, y)
        assert model.classes == [1, 2, 3]
        proba = model.predict_proba(x)
        assert np.allclose(proba.sum(axis=1), 1.0)
        assert np.mean(np.array(model.predict(x)) == y) >= 0.99
        again = har.load_model(model.save())
        assert np.array_equal(again.predict_proba(x), proba)


def test_pipeline_end_to_end(tmp_path):
    data = har.synthetic_dataset(3, trials_per_class=4, trial_seconds=6.0, rate_hz=20.0)
    path = tmp_path / "synth.csv"
    har.write_dataset(path, data)
    loaded = har.load_dataset(path)
    assert len(loaded) == len(data)
    assert np.allclose(loaded[0].samples, data[0].samples, rtol=1e-8, atol=0)

    trials = [t for rec in loaded for t in har.segment_trials(rec)]
    assert len(trials) == 12
    windows = har.make_windows(trials, "snow", 2.0, 0.5)
    names, x, labels, ids = har.extract_features(windows)
    assert x.shape == (len(windows), 75)
    assert len(names) == 75 and not np.isnan(x).any()

    config = {
        "dataset_id": "synthetic-small", "window_seconds": 2.0, "folds": 4, "seed": 5,
        "ensemble": {"members": [{"kind": "gnb"}, {"kind": "knn", "k": 3}, {"kind": "cart", "max_depth": 4}]},
    }
    report = har.cross_validate(loaded, config)
    assert report == har.cross_validate(loaded, config)
    assert len(report["folds"]) == 4
    assert "Accuracy" in har.render_report(report)


def test_errors_surface_as_exceptions(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("#meta subject=s rate_hz=50\nlabel,a_x,a_y,a_z\n1,0,0\n")
    with pytest.raises(har.ParseError, match="^bad.csv: line 3: "):
        har.load_dataset(bad)
    with pytest.raises(har.HarError):
        har.train({"kind": "nope"}, np.zeros((2, 2)), [1, 2])

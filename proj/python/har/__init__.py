"""Wearable-sensor activity recognition pipeline (C++ core)."""

import json

from ._har import (
    ABSTAIN,
    HarError,
    Model,
    ParseError,
    Recording,
    Trial,
    Window,
    accuracy,
    confidence_interval,
    dct2,
    dft,
    hard_vote,
    load_dataset,
    loto_folds,
    macro_fscore,
    macro_precision,
    macro_recall,
    make_windows,
    read_mhealth_dir,
    read_mhealth_file,
    segment_trials,
    select_channels,
    soft_vote,
    synthetic_dataset,
    time_features,
    window_length_samples,
    write_dataset,
)
from . import _har


def _dump(obj):
    return "" if obj is None else json.dumps(obj)


def extract_features(windows, config=None):
    """Returns (names, matrix, labels, trial_ids) for the given windows."""
    return _har.extract_features(windows, _dump(config))


def train(spec, x, y):
    """Trains one learner; `spec` is a dict such as {"kind": "knn", "k": 3}."""
    return _har.train(_dump(spec), x, y)


def load_model(text):
    return _har.load_model(text)


def cross_validate(recordings, config=None):
    """Runs leave-one-trial-out cross-validation and returns the report as a dict."""
    return json.loads(_har.cross_validate(recordings, _dump(config)))


def render_report(report):
    return _har.render_report(json.dumps(report))


__all__ = [name for name in dir() if not name.startswith("_") and name != "json"]

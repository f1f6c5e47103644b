"""Desk-scale reference classifiers and metrics over densified datasets.

These consumers exercise the container end to end: banded DTW nearest
neighbor on the NaN-stripped value sequences, random-interval summary
features, an interval-skewness threshold rule that classifies purely from
the time axis, and macro-averaged F1 to score them.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats as _sps

from .core import SPLIT_KEY, TARGET_KEY, IrregularDataset
from .densify import DenseView, to_dense_min_ragged
from .taxonomy import SignalTimestamps

__all__ = [
    "LabeledDenseSet",
    "labeled_split",
    "dtw_distance",
    "knn_predict",
    "interval_features",
    "delta_skewness",
    "instance_delta_skewness",
    "SkewRule",
    "f1_macro",
]


@dataclass(frozen=True)
class LabeledDenseSet:
    """Densified instances with their class labels and split assignment."""

    dense: DenseView
    labels: tuple[str, ...]
    split: tuple[str, ...]

    def __post_init__(self):
        n = self.dense.values.shape[0]
        if len(self.labels) != n or len(self.split) != n:
            raise ValueError("labels and split must have one element per instance")

    @property
    def n_instances(self) -> int:
        return self.dense.values.shape[0]


def labeled_split(ds: IrregularDataset) -> tuple[LabeledDenseSet, LabeledDenseSet]:
    """Split a dataset on its stored train/test assignment and densify each part.

    Requires complete ``target`` and ``split`` static attributes.
    """
    for key in (TARGET_KEY, SPLIT_KEY):
        if key not in ds.static_attributes:
            raise ValueError(f"dataset has no {key!r} attribute")
        if any(v is None for v in ds.static_attributes[key]):
            raise ValueError(f"attribute {key!r} must be set for every instance")
    split = ds.attribute(SPLIT_KEY)
    target = ds.attribute(TARGET_KEY)
    out = []
    for part in ("train", "test"):
        idx = [i for i, s in enumerate(split) if s == part]
        sub = ds.select_instances(idx)
        out.append(LabeledDenseSet(
            dense=to_dense_min_ragged(sub),
            labels=tuple(str(target[i]) for i in idx),
            split=tuple(part for _ in idx)))
    return out[0], out[1]


# -- dynamic time warping ------------------------------------------------------

def _dtw_fill(a, b, band):  # pragma: no cover - exercised through dtw_distance
    m = a.shape[0]
    n = b.shape[0]
    acc = np.full((m + 1, n + 1), np.inf)
    acc[0, 0] = 0.0
    for i in range(1, m + 1):
        lo = i - band if i - band > 1 else 1
        hi = i + band if i + band < n else n
        for j in range(lo, hi + 1):
            cost = a[i - 1] - b[j - 1]
            if cost < 0:
                cost = -cost
            best = acc[i - 1, j - 1]
            if acc[i - 1, j] < best:
                best = acc[i - 1, j]
            if acc[i, j - 1] < best:
                best = acc[i, j - 1]
            acc[i, j] = cost + best
    return acc[m, n]


_fill_impl = None


def _get_fill():
    # numba cuts the DP cost by ~two orders of magnitude; the pure-Python
    # body stays the single source of truth and the fallback
    global _fill_impl
    if _fill_impl is None:
        impl = _dtw_fill
        try:
            import numba
            impl = numba.njit(cache=True)(_dtw_fill)
        except ImportError:
            pass
        _fill_impl = impl
    return _fill_impl


def dtw_distance(a, b, band: int) -> float:
    """Banded dynamic time warping distance between two value sequences.

    Absolute-difference local cost with the cumulative-sum recurrence; the
    warping path is constrained to ``|i - j| <= band``, with the band
    widened to the length difference so a path always exists. Symmetric in
    its arguments.
    """
    a = np.ascontiguousarray(a, dtype=np.float64)
    b = np.ascontiguousarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1:
        raise ValueError("sequences must be one-dimensional")
    if a.size == 0 or b.size == 0:
        raise ValueError("sequences must be non-empty")
    if band < 0:
        raise ValueError("band must be non-negative")
    effective = max(int(band), abs(a.size - b.size))
    return float(_get_fill()(a, b, effective))


def _observation_vector(dense: DenseView, i: int, j: int) -> np.ndarray:
    row = dense.values[i, j]
    return row[~np.isnan(row)]


def _instance_distance(train: DenseView, test: DenseView, it: int, ir: int,
                       band: int) -> float:
    # sum of per-signal DTWs; a signal empty on either side contributes 0
    total = 0.0
    for j in range(test.values.shape[1]):
        a = _observation_vector(test, it, j)
        b = _observation_vector(train, ir, j)
        if a.size and b.size:
            total += dtw_distance(a, b, band)
    return total


def knn_predict(train: LabeledDenseSet, test: LabeledDenseSet, k: int = 1,
                band: int = 10) -> list[str]:
    """Classify each test instance by majority vote of its k DTW neighbors.

    Vote ties break toward the label with the smallest summed neighbor
    distance, then toward the one containing the lowest train ordinal.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if train.n_instances == 0:
        raise ValueError("training set is empty")
    if train.dense.values.shape[1] != test.dense.values.shape[1]:
        raise ValueError("train and test must share the signal axis")
    predictions = []
    n_train = train.n_instances
    kk = min(k, n_train)
    for it in range(test.n_instances):
        dists = np.array([_instance_distance(train.dense, test.dense, it, ir, band)
                          for ir in range(n_train)])
        neighbors = np.argsort(dists, kind="stable")[:kk]
        votes = Counter(train.labels[r] for r in neighbors)
        top = max(votes.values())
        tied = [label for label, c in votes.items() if c == top]
        if len(tied) == 1:
            predictions.append(tied[0])
            continue
        rank = {label: (sum(dists[r] for r in neighbors if train.labels[r] == label),
                        min(int(r) for r in neighbors if train.labels[r] == label))
                for label in tied}
        predictions.append(min(tied, key=lambda lbl: rank[lbl]))
    return predictions


# -- interval features ---------------------------------------------------------

def _moment_stats(window: np.ndarray) -> list[float]:
    obs = window[~np.isnan(window)]
    if obs.size == 0:
        return [np.nan] * 7
    if obs.std() == 0:
        skew = kurt = 0.0  # degenerate-moment convention
    else:
        skew = float(_sps.skew(obs, bias=True))
        kurt = float(_sps.kurtosis(obs, fisher=True, bias=True))
    return [float(obs.mean()), float(obs.std()), float(obs.min()),
            float(obs.max()), float(np.median(obs)), skew, kurt]


def interval_features(series, n_intervals: int | None = None,
                      rng_seed: int = 0) -> np.ndarray:
    """Summary statistics over random subintervals of one series.

    For each interval ``[s, e)`` the seven statistics (mean, population
    std, min, max, median, skewness, excess kurtosis) are computed over the
    non-NaN values; an all-NaN interval yields seven NaNs. The default
    interval count is ``ceil(ln(len(series)))``. Deterministic per seed.
    """
    series = np.asarray(series, dtype=np.float64)
    if series.ndim != 1 or series.size == 0:
        raise ValueError("series must be a non-empty 1-d sequence")
    if n_intervals is None:
        n_intervals = max(1, int(np.ceil(np.log(series.size))))
    if n_intervals < 1:
        raise ValueError("n_intervals must be at least 1")
    rng = np.random.default_rng(rng_seed)
    feats: list[float] = []
    for _ in range(n_intervals):
        start = int(rng.integers(0, series.size))
        end = int(rng.integers(start + 1, series.size + 1))
        feats.extend(_moment_stats(series[start:end]))
    return np.asarray(feats, dtype=np.float64)


# -- interval-skewness rule ------------------------------------------------------

def delta_skewness(ts) -> float:
    """Sample skewness (m3 / m2^1.5) of a timestamp vector's intervals.

    Requires at least three intervals; exactly even spacing gives 0.0.
    """
    arr = ts.ts if isinstance(ts, SignalTimestamps) else np.asarray(ts, np.float64)
    deltas = np.diff(arr)
    if deltas.size < 3:
        raise ValueError("need at least 3 intervals for a skewness estimate")
    if deltas.std() == 0:
        return 0.0
    return float(_sps.skew(deltas, bias=True))


def instance_delta_skewness(dense: DenseView) -> np.ndarray:
    """Per-instance interval skewness of the densified slot timestamps."""
    out = np.empty(dense.slot_timestamps.shape[0], dtype=np.float64)
    for i, row in enumerate(dense.slot_timestamps):
        out[i] = delta_skewness(row[~np.isnan(row)])
    return out


@dataclass(frozen=True)
class SkewRule:
    """Nearest-class-mean threshold rule on per-instance interval skewness."""

    class_means: tuple[tuple[str, float], ...]

    @classmethod
    def fit(cls, train: LabeledDenseSet) -> "SkewRule":
        skews = instance_delta_skewness(train.dense)
        means = []
        for label in sorted(set(train.labels)):
            mask = np.array([lbl == label for lbl in train.labels])
            means.append((label, float(skews[mask].mean())))
        means.sort(key=lambda item: item[1])
        return cls(class_means=tuple(means))

    def predict(self, test: LabeledDenseSet) -> list[str]:
        skews = instance_delta_skewness(test.dense)
        labels = [label for label, _ in self.class_means]
        centers = np.array([m for _, m in self.class_means])
        return [labels[int(np.argmin(np.abs(centers - s)))] for s in skews]


# -- metrics --------------------------------------------------------------------

def f1_macro(y_true: Sequence, y_pred: Sequence) -> float:
    """Unweighted mean of per-class F1 over the classes present in ``y_true``.

    Precision/recall of 0/0 count as 0; invariant under consistent label
    renaming of both arguments.
    """
    y_true = list(y_true)
    y_pred = list(y_pred)
    if len(y_true) != len(y_pred):
        raise ValueError(f"length mismatch: {len(y_true)} vs {len(y_pred)}")
    if not y_true:
        raise ValueError("need at least one element")
    scores = []
    for label in sorted(set(y_true), key=repr):
        tp = sum(1 for t, p in zip(y_true, y_pred) if t == label and p == label)
        fp = sum(1 for t, p in zip(y_true, y_pred) if t != label and p == label)
        fn = sum(1 for t, p in zip(y_true, y_pred) if t == label and p != label)
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / (tp + fn) if tp + fn else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        scores.append(f1)
    return float(np.mean(scores))

"""Dataset summary statistics: missing ratio, sampling variability, class balance.

All dispersions use the population standard deviation, so length-2 inputs
are deterministic and no bias correction sneaks in. The missing ratio is
computed over the minimally ragged dense cells, which counts raggedness
padding together with explicit NaN observations: after densification the
two are indistinguishable, and the ratio reflects what a dense consumer
actually receives.
"""

from __future__ import annotations

import csv
import io
from collections import Counter
from dataclasses import dataclass, fields
from typing import Sequence

import numpy as np

from .core import TARGET_KEY, IrregularDataset
from .densify import to_dense_min_ragged

__all__ = [
    "DatasetStats",
    "missing_ratio",
    "sampling_cv",
    "class_unbalance",
    "dataset_summary",
]


@dataclass(frozen=True)
class DatasetStats:
    """Summary record for one dataset.

    ``class_unbalance`` is ``None`` (and ``n_classes`` 0) when no complete
    ``target`` attribute is available.
    """

    n_instances: int
    n_signals: int
    max_obs: int
    n_classes: int
    class_unbalance: float | None
    missing_ratio: float
    sampling_cv: float

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}

    def to_csv(self) -> str:
        """Single-row CSV with header."""
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        d = self.as_dict()
        writer.writerow(d.keys())
        writer.writerow("" if v is None else v for v in d.values())
        return buf.getvalue()


def missing_ratio(ds: IrregularDataset) -> float:
    """Fraction of NaN cells in the minimally ragged dense tensor.

    0.0 for a dataset that densifies to zero cells.
    """
    values = to_dense_min_ragged(ds).values
    if values.size == 0:
        return 0.0
    return float(np.isnan(values).sum() / values.size)


def _signal_cv(ts: np.ndarray) -> float:
    if ts.size < 2:
        return 0.0
    deltas = np.diff(ts)
    mean = deltas.mean()
    if mean == 0:
        return 0.0
    return float(deltas.std() / mean)


def sampling_cv(ds: IrregularDataset) -> float:
    """Coefficient of variation of sampling intervals.

    Per signal: population std of the interval vector over its mean (0 for
    fewer than two observations). Averaged over each instance's signals
    first, then over instances.
    """
    n, d, _ = ds.tensor.shape
    if n == 0 or d == 0:
        return 0.0
    per_instance = np.empty(n, dtype=np.float64)
    for i in range(n):
        per_instance[i] = np.mean([_signal_cv(ds.signal_timestamps(i, j))
                                   for j in range(d)])
    return float(per_instance.mean())


def class_unbalance(labels: Sequence) -> float:
    """Population standard deviation of the per-class instance fractions.

    0.0 for perfectly balanced classes (including the single-class case).
    """
    labels = list(labels)
    if not labels:
        raise ValueError("at least one label is required")
    counts = np.array(list(Counter(labels).values()), dtype=np.float64)
    fractions = counts / len(labels)
    return float(fractions.std())


def dataset_summary(ds: IrregularDataset) -> DatasetStats:
    """Assemble the full summary record for a dataset."""
    dense = to_dense_min_ragged(ds)
    mv = 0.0 if dense.values.size == 0 else float(
        np.isnan(dense.values).sum() / dense.values.size)
    target = ds.static_attributes.get(TARGET_KEY)
    if target is not None and ds.n_instances > 0 and all(v is not None for v in target):
        cu = class_unbalance(target)
        n_classes = len(set(target))
    else:
        cu = None
        n_classes = 0
    return DatasetStats(
        n_instances=ds.n_instances,
        n_signals=ds.n_signals,
        max_obs=dense.max_len,
        n_classes=n_classes,
        class_unbalance=cu,
        missing_ratio=mv,
        sampling_cv=sampling_cv(ds),
    )

"""Synthetic three-class benchmark where the class lives in the time axis.

Every instance carries the same value sequence: the lower half of the unit
circle sampled at equally spaced arguments and z-standardized. What differs
between classes is how the sampling clock advances. Each timestamp vector
is the running sum of power-transformed uniform draws, and the exponent
controls the sign of the skewness of the interval multiset:

* ``alembic`` -- intervals ``u ** gamma``: right-skewed (a few long gaps),
* ``bowl``    -- intervals ``u``: symmetric, skewness about zero,
* ``flask``   -- intervals ``u ** (1 / gamma)``: left-skewed.

Because the value sequences are identical, a classifier that ignores
timestamps cannot beat chance; the interval-skewness statistic separates
the classes almost perfectly. Instances never share timestamps, so the
dataset is unevenly sampled but shows no raggedness flags.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import SPLIT_KEY, TARGET_KEY, IrregularDataset, SparseIrregularTensor
from .index import TimestampIndex

__all__ = ["AbfConfig", "generate_abf", "CLASS_NAMES"]

CLASS_NAMES = ("alembic", "bowl", "flask")
SIGNAL_NAME = "value"


@dataclass(frozen=True)
class AbfConfig:
    """Generator configuration; defaults reproduce the reference dataset shape
    (930 instances: 10 train / 300 test per class, univariate, length 128)."""

    seed: int = 0
    per_class_train: int = 10
    per_class_test: int = 300
    series_length: int = 128
    skew_strength: float = 3.0

    def __post_init__(self):
        if self.seed < 0:
            raise ValueError("seed must be a non-negative integer")
        if self.series_length < 3:
            raise ValueError("series_length must be at least 3")
        if self.skew_strength <= 0:
            raise ValueError("skew_strength must be positive")
        if self.per_class_train < 0 or self.per_class_test < 0:
            raise ValueError("per-class counts must be non-negative")


def _semicircle_values(length: int) -> np.ndarray:
    args = np.linspace(0.0, 1.0, length)
    x = -np.sqrt(np.clip(1.0 - (2.0 * args - 1.0) ** 2, 0.0, None))
    std = x.std()
    return (x - x.mean()) / std if std > 0 else x - x.mean()


def _class_exponent(class_name: str, gamma: float) -> float:
    return {"alembic": gamma, "bowl": 1.0, "flask": 1.0 / gamma}[class_name]


def _instance_timestamps(rng: np.random.Generator, length: int,
                         exponent: float) -> np.ndarray:
    while True:
        spacings = rng.uniform(size=length) ** exponent
        ts = np.cumsum(spacings)
        if np.all(np.diff(ts) > 0):  # reject the (measure-zero) zero spacing
            return ts


def generate_abf(cfg: AbfConfig = AbfConfig()) -> IrregularDataset:
    """Generate the dataset described by ``cfg``.

    Deterministic per seed: each instance draws from its own substream
    derived from (seed, instance ordinal), so the output is bit-for-bit
    reproducible and per-instance generation could fan out in parallel.
    """
    length = cfg.series_length
    values_template = _semicircle_values(length)

    plan = [(class_name, split)
            for split, count in (("train", cfg.per_class_train),
                                 ("test", cfg.per_class_test))
            for class_name in CLASS_NAMES
            for _ in range(count)]

    n = len(plan)
    all_ts = np.empty((n, length), dtype=np.float64)
    instance_ids = []
    labels = []
    splits = []
    counters: dict[tuple[str, str], int] = {}
    for ordinal, (class_name, split) in enumerate(plan):
        rng = np.random.default_rng([cfg.seed, ordinal])
        all_ts[ordinal] = _instance_timestamps(
            rng, length, _class_exponent(class_name, cfg.skew_strength))
        serial = counters[(class_name, split)] = counters.get((class_name, split), 0) + 1
        instance_ids.append(f"{class_name}_{split}_{serial:04d}")
        labels.append(class_name)
        splits.append(split)

    flat_ts = all_ts.reshape(-1)
    order = np.argsort(flat_ts, kind="stable")
    sorted_ts = flat_ts[order]
    # global positions of each instance's timestamps in the union index
    positions = np.empty(flat_ts.size, dtype=np.int64)
    if flat_ts.size:
        uniq_mask = np.empty(flat_ts.size, dtype=bool)
        uniq_mask[0] = True
        uniq_mask[1:] = sorted_ts[1:] > sorted_ts[:-1]
        positions[order] = np.cumsum(uniq_mask) - 1
        index = TimestampIndex(sorted_ts[uniq_mask])
    else:
        index = TimestampIndex([])

    tensor = SparseIrregularTensor(
        (n, 1, len(index)),
        np.repeat(np.arange(n, dtype=np.int64), length),
        np.zeros(n * length, dtype=np.int64),
        positions,
        np.tile(values_template, n))
    return IrregularDataset(tensor, index, instance_ids, [SIGNAL_NAME],
                            {TARGET_KEY: labels, SPLIT_KEY: splits})

"""Shared test fixtures: random dataset generation and independent oracles.

The oracles here deliberately avoid the library's vectorized code paths so
they stay meaningful as cross-checks: densification goes cell by cell
through ``get_value``, DTW enumerates every warping path, and the moment
statistics use the textbook formulas directly.
"""

from __future__ import annotations

import numpy as np

from irts.core import IrregularDataset, ObservationKind, SparseIrregularTensor
from irts.index import TimestampIndex

CLASS_POOL = ("c0", "c1", "c2", "c3")
FUNKY_IDS = ('with,comma', 'with"quote', "with space", "unié")


def make_random_dataset(rng: np.random.Generator, max_n: int = 6, max_d: int = 6,
                        max_t: int = 12, allow_empty_dims: bool = True,
                        with_split: bool = True) -> IrregularDataset:
    """Small random dataset with NaN entries, empty instances, attribute holes,
    and occasionally unreferenced index timestamps and csv-hostile ids."""
    low = 0 if allow_empty_dims else 1
    n = int(rng.integers(low, max_n + 1))
    d = int(rng.integers(low, max_d + 1))
    t_count = int(rng.integers(low, max_t + 1))

    # grid-friendly floats: shifts and scalings used by invariance tests stay exact
    pool = np.arange(-8, 40) * 0.25
    timestamps = np.sort(rng.choice(pool, size=t_count, replace=False))
    index = TimestampIndex(timestamps)

    entries = []
    empty_instances = set(
        rng.choice(n, size=int(rng.integers(0, n + 1)) // 3, replace=False)) if n else set()
    for i in range(n):
        if i in empty_instances:
            continue
        for j in range(d):
            if t_count == 0:
                continue
            n_obs = int(rng.integers(0, t_count + 1))
            ks = rng.choice(t_count, size=n_obs, replace=False)
            for k in ks:
                x = np.nan if rng.random() < 0.15 else float(np.round(rng.normal(), 3))
                entries.append((i, j, int(k), x))
    tensor = SparseIrregularTensor.from_entries((n, d, t_count), entries)

    def make_ids(count, prefix):
        ids = [f"{prefix}{z:02d}" for z in range(count)]
        if count and rng.random() < 0.3:
            ids[int(rng.integers(0, count))] = (
                rng.choice(FUNKY_IDS) + f"_{prefix}{rng.integers(100, 999)}")
        return ids

    attrs = {}
    if n:
        attrs["target"] = [str(rng.choice(CLASS_POOL)) for _ in range(n)]
        if with_split:
            attrs["split"] = [str(rng.choice(["train", "test"])) for _ in range(n)]
        if rng.random() < 0.6:
            attrs["site"] = [None if rng.random() < 0.3
                             else float(np.round(rng.uniform(0, 5), 2))
                             for _ in range(n)]
    return IrregularDataset(tensor, index, make_ids(n, "inst"), make_ids(d, "sig"), attrs)


def densify_oracle(ds: IrregularDataset):
    """Brute-force minimally ragged densification.

    Materializes the full (n, d, t) tensor one coordinate at a time through
    ``get_value``, then per instance deletes the time columns that are
    implicitly missing across all signals (explicit-NaN columns keep their
    slot). Returns (values, slot_timestamps, max_len).
    """
    n, d, t_count = ds.tensor.shape
    full = np.full((n, d, t_count), np.nan)
    present = np.zeros((n, t_count), dtype=bool)
    for i in range(n):
        for j in range(d):
            for k in range(t_count):
                obs = ds.get_value(i, j, k)
                if obs.kind is not ObservationKind.IMPLICIT_MISSING:
                    present[i, k] = True
                if obs.kind is ObservationKind.OBSERVED:
                    full[i, j, k] = obs.value
    max_len = int(present.sum(axis=1).max()) if n else 0
    values = np.full((n, d, max_len), np.nan)
    slots = np.full((n, max_len), np.nan)
    for i in range(n):
        for r, k in enumerate(np.flatnonzero(present[i])):
            values[i, :, r] = full[i, :, k]
            slots[i, r] = ds.index.timestamps[k]
    return values, slots, max_len


def dtw_brute(a, b) -> float:
    """Exhaustive enumeration of all monotone warping paths (no banding)."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = len(a), len(b)
    best = [np.inf]

    def walk(i, j, acc):
        acc += abs(a[i] - b[j])
        if acc >= best[0]:
            return
        if i == m - 1 and j == n - 1:
            best[0] = acc
            return
        if i + 1 < m and j + 1 < n:
            walk(i + 1, j + 1, acc)
        if i + 1 < m:
            walk(i + 1, j, acc)
        if j + 1 < n:
            walk(i, j + 1, acc)

    walk(0, 0, 0.0)
    return float(best[0])


def sample_skewness_oracle(x) -> float:
    """Textbook m3 / m2^(3/2) with population moments."""
    x = np.asarray(x, dtype=float)
    m = x.mean()
    m2 = ((x - m) ** 2).mean()
    m3 = ((x - m) ** 3).mean()
    return 0.0 if m2 == 0 else float(m3 / m2 ** 1.5)


def excess_kurtosis_oracle(x) -> float:
    x = np.asarray(x, dtype=float)
    m = x.mean()
    m2 = ((x - m) ** 2).mean()
    m4 = ((x - m) ** 4).mean()
    return 0.0 if m2 == 0 else float(m4 / m2 ** 2 - 3.0)

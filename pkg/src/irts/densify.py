"""Sparse-to-dense conversion and closed-form memory estimators.

The minimally ragged conversion renumbers each instance's observed time
positions into a consecutive run of per-instance ranks (dense ranking over
the union of the instance's signals), so the dense time axis shrinks from
the global timestamp count to the longest per-instance observation count.
Cross-signal alignment within an instance survives; absolute timestamps are
kept in a companion per-slot array for timestamp-aware consumers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal, Mapping

import numpy as np

from .core import IrregularDataset
from .errors import CapacityError

__all__ = [
    "DenseView",
    "rank_positions",
    "to_dense_min_ragged",
    "to_dense_full",
    "memory_estimate",
    "max_instance_len",
]

BYTES_PER_SCALAR = 8  # container values are float64

DEFAULT_MAX_CELLS = 100_000_000


@dataclass(frozen=True)
class DenseView:
    """Minimally ragged dense materialization of a dataset.

    Attributes
    ----------
    values : float64 array, shape (n_instances, n_signals, max_len)
        Observed values at their per-instance rank slot; NaN everywhere
        else. Explicit-NaN entries densify to NaN and are indistinguishable
        from padding here.
    slot_timestamps : float64 array, shape (n_instances, max_len)
        Timestamp occupying each rank slot of each instance; NaN for unused
        trailing slots. Strictly increasing over each instance's first
        ``len(observed_positions(i))`` slots.
    max_len : int
        Longest per-instance observation count (0 for an empty dataset).
    """

    values: np.ndarray
    slot_timestamps: np.ndarray
    max_len: int = field(default=0)

    def __post_init__(self):
        self.values.flags.writeable = False
        self.slot_timestamps.flags.writeable = False


def rank_positions(ks) -> dict[int, int]:
    """Dense-rank a sorted strictly increasing position list, 1-based.

    ``[2, 5, 7] -> {2: 1, 5: 2, 7: 3}``. Ranks are reported 1-based;
    internal densification uses ``rank - 1`` as the slot index.
    """
    arr = np.asarray(ks, dtype=np.int64)
    if arr.ndim != 1:
        raise ValueError("positions must be one-dimensional")
    if arr.size > 1 and not np.all(np.diff(arr) > 0):
        raise ValueError("positions must be sorted strictly increasing")
    return {int(k): r + 1 for r, k in enumerate(arr)}


def _instance_rank_layout(ds: IrregularDataset):
    """Vectorized per-instance dense ranking of all stored entries.

    Returns ``(ranks, union_instance, union_k, counts)`` where ``ranks``
    maps each entry to its 0-based slot, ``union_instance``/``union_k``
    enumerate each instance's distinct observed positions in order, and
    ``counts[i]`` is instance ``i``'s observation count.
    """
    t = ds.tensor
    n, _, t_count = t.shape
    counts = np.zeros(n, dtype=np.int64)
    if t.nnz == 0:
        empty = np.array([], dtype=np.int64)
        return empty, empty, empty, counts
    stride = t_count  # safe: k < t_count whenever entries exist
    combined = t.instance_idx * stride + t.time_idx
    union = np.unique(combined)
    union_instance = union // stride
    union_k = union % stride
    np.add.at(counts, union_instance, 1)
    starts = np.searchsorted(union, np.arange(n, dtype=np.int64) * stride)
    ranks = np.searchsorted(union, combined) - starts[t.instance_idx]
    return ranks, union_instance, union_k, counts


def max_instance_len(ds: IrregularDataset) -> int:
    """Longest per-instance observation count (the dense-min time extent)."""
    _, _, _, counts = _instance_rank_layout(ds)
    return int(counts.max()) if counts.size else 0


def to_dense_min_ragged(ds: IrregularDataset) -> DenseView:
    """Densify with per-instance dense ranking of time positions.

    Each entry lands at ``values[i, j, rank_i(k) - 1]``; the rank is taken
    over the union of the instance's signal positions, so signals of one
    instance stay mutually aligned. Unused cells are NaN.
    """
    t = ds.tensor
    n, d, _ = t.shape
    ranks, union_instance, union_k, counts = _instance_rank_layout(ds)
    max_len = int(counts.max()) if counts.size else 0
    values = np.full((n, d, max_len), np.nan, dtype=np.float64)
    slots = np.full((n, max_len), np.nan, dtype=np.float64)
    if t.nnz:
        values[t.instance_idx, t.signal_idx, ranks] = t.values
        slot_of_union = np.arange(union_instance.size, dtype=np.int64) - \
            np.concatenate(([0], np.cumsum(counts)))[union_instance]
        slots[union_instance, slot_of_union] = ds.index.timestamps[union_k]
    return DenseView(values=values, slot_timestamps=slots, max_len=max_len)


def to_dense_full(ds: IrregularDataset,
                  max_cells: int = DEFAULT_MAX_CELLS) -> np.ndarray:
    """Densify onto the full global time axis (no ranking).

    Every entry keeps its global time position; all other cells are NaN.
    Refuses to allocate more than ``max_cells`` scalars.
    """
    n, d, t_count = ds.tensor.shape
    required = n * d * t_count
    if required > max_cells:
        raise CapacityError(required, max_cells)
    out = np.full((n, d, t_count), np.nan, dtype=np.float64)
    t = ds.tensor
    if t.nnz:
        out[t.instance_idx, t.signal_idx, t.time_idx] = t.values
    return out


Representation = Literal["sparse", "dense_min", "dense_full"]


def memory_estimate(ds: IrregularDataset, repr: Representation) -> int:
    """Closed-form byte cost of a representation, at 8 bytes per scalar.

    sparse: 4 scalars per stored entry (three coordinates plus the value);
    dense_min: ``n * d * max_len``; dense_full: ``n * d * n_timestamps``.
    """
    n, d, t_count = ds.tensor.shape
    if repr == "sparse":
        return 4 * ds.nnz * BYTES_PER_SCALAR
    if repr == "dense_min":
        return n * d * max_instance_len(ds) * BYTES_PER_SCALAR
    if repr == "dense_full":
        return n * d * t_count * BYTES_PER_SCALAR
    raise ValueError(f"unknown representation {repr!r}")


def memory_estimates(ds: IrregularDataset) -> Mapping[str, int]:
    """All three estimates at once (avoids recomputing the rank layout)."""
    return {r: memory_estimate(ds, r) for r in ("sparse", "dense_min", "dense_full")}

"""Sparse COO container for irregular time series datasets.

A dataset is a 3-d sparse tensor over (instance, signal, time position)
holding one float64 value per stored coordinate, plus the timestamp index
that gives the time positions their real-valued meaning, string identifiers
for both axes, and per-instance static attributes.

Missingness comes in two kinds and the distinction is load-bearing
throughout the package:

* **explicit missing** -- a stored entry whose value is NaN: an observation
  that was expected at that coordinate but absent.
* **implicit missing** -- no entry at the coordinate at all: padding that
  only materializes as NaN when the tensor is densified.

Datasets are immutable after construction (backing arrays are marked
read-only), so concurrent readers need no synchronization.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Any, Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from .errors import DataError
from .index import TimestampIndex

__all__ = [
    "CooEntry",
    "ObservationKind",
    "Observation",
    "SparseIrregularTensor",
    "IrregularDataset",
    "SPLIT_KEY",
    "TARGET_KEY",
]

TARGET_KEY = "target"
SPLIT_KEY = "split"
_SPLIT_VALUES = frozenset({"train", "test"})

AttrValue = Any  # str | int | float | None


class CooEntry(NamedTuple):
    """One stored observation: coordinate triplet plus value (NaN allowed)."""

    instance_idx: int
    signal_idx: int
    time_idx: int
    value: float


class ObservationKind(enum.Enum):
    OBSERVED = "observed"
    EXPLICIT_MISSING = "explicit_missing"
    IMPLICIT_MISSING = "implicit_missing"


@dataclass(frozen=True)
class Observation:
    """State of one (instance, signal, time) coordinate.

    Exactly one of the three kinds holds for every in-range coordinate;
    ``value`` is set only for :attr:`ObservationKind.OBSERVED`.
    """

    kind: ObservationKind
    value: float | None = None

    @property
    def is_observed(self) -> bool:
        return self.kind is ObservationKind.OBSERVED


class SparseIrregularTensor:
    """COO triplet store sorted lexicographically by (instance, signal, time).

    Parameters
    ----------
    shape : (n_instances, n_signals, n_timestamps)
    instance_idx, signal_idx, time_idx : int arrays of equal length
        Coordinates, already sorted lexicographically with no duplicates.
    values : float64 array of equal length
        Observed values; NaN encodes an explicit missing observation.

    Use :meth:`from_arrays` or :meth:`from_entries` for unsorted input with
    a duplicate policy.
    """

    __slots__ = ("shape", "instance_idx", "signal_idx", "time_idx", "values",
                 "_instance_starts")

    def __init__(self, shape: tuple[int, int, int],
                 instance_idx, signal_idx, time_idx, values):
        n, d, t_count = (int(s) for s in shape)
        if min(n, d, t_count) < 0:
            raise ValueError(f"negative dimension in shape {shape}")
        ii = np.ascontiguousarray(instance_idx, dtype=np.int64)
        jj = np.ascontiguousarray(signal_idx, dtype=np.int64)
        kk = np.ascontiguousarray(time_idx, dtype=np.int64)
        xx = np.ascontiguousarray(values, dtype=np.float64)
        if not (ii.shape == jj.shape == kk.shape == xx.shape) or ii.ndim != 1:
            raise ValueError("coordinate and value arrays must be 1-d and equally long")
        if ii.size:
            for name, arr, bound in (("instance", ii, n), ("signal", jj, d),
                                     ("time", kk, t_count)):
                if arr.min() < 0 or arr.max() >= bound:
                    raise ValueError(f"{name} index out of range [0, {bound})")
            key = (ii[1:] > ii[:-1]) | ((ii[1:] == ii[:-1]) & (
                (jj[1:] > jj[:-1]) | ((jj[1:] == jj[:-1]) & (kk[1:] > kk[:-1]))))
            if not bool(np.all(key)):
                raise ValueError("entries must be sorted by (instance, signal, time) "
                                 "with no duplicate coordinates")
        for arr in (ii, jj, kk, xx):
            arr.flags.writeable = False
        object.__setattr__(self, "shape", (n, d, t_count))
        object.__setattr__(self, "instance_idx", ii)
        object.__setattr__(self, "signal_idx", jj)
        object.__setattr__(self, "time_idx", kk)
        object.__setattr__(self, "values", xx)
        # entries of instance i live in slice starts[i]:starts[i+1]
        starts = np.searchsorted(ii, np.arange(n + 1))
        starts.flags.writeable = False
        object.__setattr__(self, "_instance_starts", starts)

    def __setattr__(self, name, value):
        raise AttributeError("SparseIrregularTensor is immutable")

    @classmethod
    def from_arrays(cls, shape, instance_idx, signal_idx, time_idx, values,
                    duplicate_policy: str = "error") -> "SparseIrregularTensor":
        """Build from unsorted coordinate arrays.

        ``duplicate_policy`` is ``"error"`` (raise :class:`DataError` on any
        repeated coordinate) or ``"last-wins"`` (keep the last occurrence in
        input order).
        """
        if duplicate_policy not in ("error", "last-wins"):
            raise ValueError(f"unknown duplicate policy {duplicate_policy!r}")
        ii = np.asarray(instance_idx, dtype=np.int64)
        jj = np.asarray(signal_idx, dtype=np.int64)
        kk = np.asarray(time_idx, dtype=np.int64)
        xx = np.asarray(values, dtype=np.float64)
        order = np.lexsort((kk, jj, ii))  # stable: ties keep input order
        ii, jj, kk, xx = ii[order], jj[order], kk[order], xx[order]
        if ii.size:
            dup = (ii[1:] == ii[:-1]) & (jj[1:] == jj[:-1]) & (kk[1:] == kk[:-1])
            if np.any(dup):
                if duplicate_policy == "error":
                    pos = int(np.flatnonzero(dup)[0])
                    raise DataError(
                        f"duplicate coordinate (instance={ii[pos]}, "
                        f"signal={jj[pos]}, time={kk[pos]})")
                keep = np.append(~dup, True)  # last of each run survives
                ii, jj, kk, xx = ii[keep], jj[keep], kk[keep], xx[keep]
        return cls(shape, ii, jj, kk, xx)

    @classmethod
    def from_entries(cls, shape, entries: Iterable[tuple],
                     duplicate_policy: str = "error") -> "SparseIrregularTensor":
        """Build from an iterable of (instance, signal, time, value) tuples."""
        rows = list(entries)
        if not rows:
            return cls(shape, [], [], [], [])
        ii, jj, kk, xx = zip(*rows)
        return cls.from_arrays(shape, ii, jj, kk, xx, duplicate_policy)

    @property
    def nnz(self) -> int:
        """Number of stored entries, explicit-NaN entries included."""
        return int(self.values.size)

    def __len__(self) -> int:
        return self.nnz

    def __iter__(self) -> Iterator[CooEntry]:
        for i, j, k, x in zip(self.instance_idx, self.signal_idx,
                              self.time_idx, self.values):
            yield CooEntry(int(i), int(j), int(k), float(x))

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseIrregularTensor):
            return NotImplemented
        return (self.shape == other.shape
                and np.array_equal(self.instance_idx, other.instance_idx)
                and np.array_equal(self.signal_idx, other.signal_idx)
                and np.array_equal(self.time_idx, other.time_idx)
                and np.array_equal(self.values, other.values, equal_nan=True))

    def __hash__(self):
        return hash((self.shape, self.nnz))

    def __repr__(self) -> str:
        n, d, t = self.shape
        return f"SparseIrregularTensor(shape=({n}, {d}, {t}), nnz={self.nnz})"

    def instance_slice(self, i: int) -> slice:
        """Contiguous slice of the entry arrays belonging to instance ``i``."""
        s = self._instance_starts
        return slice(int(s[i]), int(s[i + 1]))


def _check_attr_value(key: str, v: AttrValue) -> None:
    if v is None or isinstance(v, (str, int)):
        return
    if isinstance(v, float):
        if not math.isfinite(v):
            raise DataError(f"static attribute {key!r} has non-finite value {v!r}")
        return
    raise DataError(f"static attribute {key!r} has unsupported type {type(v).__name__}")


class IrregularDataset:
    """A sparse irregular time series dataset.

    Combines the COO tensor with its timestamp index, unique string
    identifiers for instances and signals, and per-instance static
    attributes stored column-wise (``key -> tuple of n values``, ``None``
    marking an absent value). The keys ``"target"`` and ``"split"`` are
    reserved for classification labels and the train/test partition.
    """

    __slots__ = ("tensor", "index", "instance_ids", "signal_ids", "static_attributes")

    def __init__(self, tensor: SparseIrregularTensor, index: TimestampIndex,
                 instance_ids: Sequence[str], signal_ids: Sequence[str],
                 static_attributes: Mapping[str, Sequence[AttrValue]] | None = None):
        n, d, t_count = tensor.shape
        instance_ids = tuple(str(s) for s in instance_ids)
        signal_ids = tuple(str(s) for s in signal_ids)
        if len(instance_ids) != n:
            raise ValueError(f"{len(instance_ids)} instance ids for {n} instances")
        if len(signal_ids) != d:
            raise ValueError(f"{len(signal_ids)} signal ids for {d} signals")
        if len(set(instance_ids)) != n:
            raise DataError("instance ids must be unique")
        if len(set(signal_ids)) != d:
            raise DataError("signal ids must be unique")
        if len(index) != t_count:
            raise ValueError(f"index has {len(index)} timestamps, tensor expects {t_count}")
        attrs: dict[str, tuple[AttrValue, ...]] = {}
        for key, col in (static_attributes or {}).items():
            col = tuple(col)
            if len(col) != n:
                raise ValueError(f"attribute {key!r} has {len(col)} values for {n} instances")
            for v in col:
                _check_attr_value(key, v)
            if all(v is None for v in col):
                continue  # indistinguishable from an absent column on any wire
            attrs[str(key)] = col
        if SPLIT_KEY in attrs:
            bad = {v for v in attrs[SPLIT_KEY] if v not in _SPLIT_VALUES}
            if bad:
                raise DataError(f"split values must be 'train' or 'test', got {sorted(map(repr, bad))}")
        object.__setattr__(self, "tensor", tensor)
        object.__setattr__(self, "index", index)
        object.__setattr__(self, "instance_ids", instance_ids)
        object.__setattr__(self, "signal_ids", signal_ids)
        object.__setattr__(self, "static_attributes", attrs)

    def __setattr__(self, name, value):
        raise AttributeError("IrregularDataset is immutable")

    # -- basic shape accessors ------------------------------------------------

    @property
    def n_instances(self) -> int:
        return self.tensor.shape[0]

    @property
    def n_signals(self) -> int:
        return self.tensor.shape[1]

    @property
    def n_timestamps(self) -> int:
        return self.tensor.shape[2]

    @property
    def nnz(self) -> int:
        return self.tensor.nnz

    def __repr__(self) -> str:
        return (f"IrregularDataset(n_instances={self.n_instances}, "
                f"n_signals={self.n_signals}, n_timestamps={self.n_timestamps}, "
                f"nnz={self.nnz})")

    def __eq__(self, other) -> bool:
        if not isinstance(other, IrregularDataset):
            return NotImplemented
        return (self.tensor == other.tensor
                and self.index == other.index
                and self.instance_ids == other.instance_ids
                and self.signal_ids == other.signal_ids
                and self.static_attributes == other.static_attributes)

    def __hash__(self):
        return hash((self.tensor.shape, self.nnz, self.instance_ids, self.signal_ids))

    # -- coordinate lookup ----------------------------------------------------

    def _check_indices(self, i: int, j: int | None = None, k: int | None = None) -> None:
        n, d, t_count = self.tensor.shape
        if not 0 <= i < n:
            raise IndexError(f"instance index {i} out of range [0, {n})")
        if j is not None and not 0 <= j < d:
            raise IndexError(f"signal index {j} out of range [0, {d})")
        if k is not None and not 0 <= k < t_count:
            raise IndexError(f"time index {k} out of range [0, {t_count})")

    def get_value(self, i: int, j: int, k: int) -> Observation:
        """Resolve coordinate (i, j, k) to exactly one observation state.

        Returns ``Observation(OBSERVED, x)`` for a stored finite value,
        ``Observation(EXPLICIT_MISSING)`` for a stored NaN, and
        ``Observation(IMPLICIT_MISSING)`` when no entry exists.
        """
        i, j, k = int(i), int(j), int(k)
        self._check_indices(i, j, k)
        t = self.tensor
        sl = t.instance_slice(i)
        pos = sl.start + np.searchsorted(
            t.signal_idx[sl] * (t.shape[2] + 1) + t.time_idx[sl],
            j * (t.shape[2] + 1) + k)
        if (pos < sl.stop and t.signal_idx[pos] == j and t.time_idx[pos] == k):
            x = float(t.values[pos])
            if math.isnan(x):
                return Observation(ObservationKind.EXPLICIT_MISSING)
            return Observation(ObservationKind.OBSERVED, x)
        return Observation(ObservationKind.IMPLICIT_MISSING)

    def observed_positions(self, i: int, j: int | None = None) -> np.ndarray:
        """Sorted time positions holding entries for instance ``i``.

        With ``j`` given, the positions of that one signal (explicit-NaN
        entries included); otherwise the union over all signals of the
        instance.
        """
        self._check_indices(int(i), None if j is None else int(j))
        t = self.tensor
        sl = t.instance_slice(int(i))
        ks = t.time_idx[sl]
        if j is None:
            return np.unique(ks)
        mask = t.signal_idx[sl] == int(j)
        return np.sort(ks[mask])  # per (i, j) already sorted, sort is cheap insurance

    def signal_timestamps(self, i: int, j: int) -> np.ndarray:
        """Timestamps (not positions) at which signal ``j`` of instance ``i`` recorded."""
        return self.index.timestamps[self.observed_positions(i, j)]

    def instance_timestamps(self, i: int) -> np.ndarray:
        """Union of all signal timestamps of instance ``i``, sorted."""
        return self.index.timestamps[self.observed_positions(i)]

    # -- structural transforms ------------------------------------------------

    def slice_time_range(self, t_min: float, t_max: float) -> "IrregularDataset":
        """Restrict to timestamps within ``[t_min, t_max]`` (inclusive).

        The timestamp index is rebuilt to the retained range (positions are
        renumbered); instance/signal identifiers and static attributes are
        preserved. Slicing the full range round-trips to an equal dataset.
        """
        if t_min > t_max:
            raise ValueError(f"t_min {t_min} exceeds t_max {t_max}")
        ts = self.index.timestamps
        lo = int(np.searchsorted(ts, t_min, side="left"))
        hi = int(np.searchsorted(ts, t_max, side="right"))
        t = self.tensor
        keep = (t.time_idx >= lo) & (t.time_idx < hi)
        n, d, _ = t.shape
        sliced = SparseIrregularTensor(
            (n, d, hi - lo), t.instance_idx[keep], t.signal_idx[keep],
            t.time_idx[keep] - lo, t.values[keep])
        return IrregularDataset(sliced, TimestampIndex(ts[lo:hi]),
                                self.instance_ids, self.signal_ids,
                                self.static_attributes)

    def select_instances(self, indices: Sequence[int]) -> "IrregularDataset":
        """New dataset containing the given instances, in the given order.

        The timestamp index is kept as-is so time positions stay comparable
        with the parent dataset.
        """
        indices = [int(i) for i in indices]
        for i in indices:
            self._check_indices(i)
        if len(set(indices)) != len(indices):
            raise ValueError("instance indices must be unique")
        t = self.tensor
        parts_i, parts_j, parts_k, parts_x = [], [], [], []
        for new_i, old_i in enumerate(indices):
            sl = t.instance_slice(old_i)
            parts_i.append(np.full(sl.stop - sl.start, new_i, dtype=np.int64))
            parts_j.append(t.signal_idx[sl])
            parts_k.append(t.time_idx[sl])
            parts_x.append(t.values[sl])
        cat = lambda parts: np.concatenate(parts) if parts else np.array([], dtype=np.int64)
        sub = SparseIrregularTensor(
            (len(indices), t.shape[1], t.shape[2]),
            cat(parts_i), cat(parts_j), cat(parts_k),
            np.concatenate(parts_x) if parts_x else np.array([], dtype=np.float64))
        attrs = {key: tuple(col[i] for i in indices)
                 for key, col in self.static_attributes.items()}
        return IrregularDataset(sub, self.index,
                                [self.instance_ids[i] for i in indices],
                                self.signal_ids, attrs)

    # -- attributes -----------------------------------------------------------

    def instance_attributes(self, i: int) -> dict[str, AttrValue]:
        """Static attributes of instance ``i`` (absent values omitted)."""
        self._check_indices(int(i))
        return {key: col[i] for key, col in self.static_attributes.items()
                if col[i] is not None}

    def attribute(self, key: str) -> tuple[AttrValue, ...]:
        if key not in self.static_attributes:
            raise KeyError(f"no static attribute {key!r}")
        return self.static_attributes[key]

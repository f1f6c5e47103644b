"""Sorted global timestamp vector with a bidirectional timestamp <-> position mapping.

The index is the bridge between real-valued timestamps and the discrete time
coordinate of the sparse tensor: position ``k`` holds timestamp
``timestamps[k]``, and every timestamp maps back to exactly one position.
Timestamp identity is exact float equality; no epsilon merging happens here
(dirty data can be pre-quantized at ingestion).
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import DataError, NotFoundError

__all__ = ["TimestampIndex", "build_index"]


class TimestampIndex:
    """Immutable, strictly increasing vector of finite float64 timestamps.

    Parameters
    ----------
    timestamps : array-like of float
        Must already be sorted strictly increasing and finite. Use
        :func:`build_index` to construct from raw (unsorted, duplicated)
        values.
    """

    __slots__ = ("timestamps",)

    def __init__(self, timestamps: Iterable[float] = ()):
        arr = np.asarray(timestamps, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("timestamps must be one-dimensional")
        if arr.size and not np.all(np.isfinite(arr)):
            raise DataError("timestamps must be finite (no NaN/inf)")
        if arr.size > 1 and not np.all(np.diff(arr) > 0):
            raise ValueError("timestamps must be strictly increasing")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "timestamps", arr)

    def __setattr__(self, name, value):
        raise AttributeError("TimestampIndex is immutable")

    def __len__(self) -> int:
        return int(self.timestamps.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, TimestampIndex):
            return NotImplemented
        return np.array_equal(self.timestamps, other.timestamps)

    def __hash__(self):
        return hash(self.timestamps.tobytes())

    def __repr__(self) -> str:
        return f"TimestampIndex(len={len(self)})"

    def __contains__(self, t: float) -> bool:
        pos = np.searchsorted(self.timestamps, t)
        return bool(pos < len(self) and self.timestamps[pos] == t)

    def position_of(self, t: float) -> int:
        """Return the position ``k`` of timestamp ``t``.

        Raises
        ------
        NotFoundError
            If ``t`` is not present in the index.
        """
        pos = int(np.searchsorted(self.timestamps, t))
        if pos >= len(self) or self.timestamps[pos] != t:
            raise NotFoundError(f"timestamp {t!r} not in index")
        return pos

    def timestamp_of(self, k: int) -> float:
        """Return the timestamp stored at position ``k`` (no negative indexing)."""
        k = int(k)
        if not 0 <= k < len(self):
            raise IndexError(f"time position {k} out of range [0, {len(self)})")
        return float(self.timestamps[k])


def build_index(raw_timestamps: Iterable[float]) -> TimestampIndex:
    """Build a :class:`TimestampIndex` from an arbitrary multiset of timestamps.

    Sorts and deduplicates. Every distinct input value appears exactly once.

    Raises
    ------
    DataError
        If any value is NaN or infinite.
    """
    arr = np.asarray(list(raw_timestamps) if not isinstance(raw_timestamps, np.ndarray)
                     else raw_timestamps, dtype=np.float64)
    if arr.size and not np.all(np.isfinite(arr)):
        raise DataError("timestamps must be finite (no NaN/inf)")
    return TimestampIndex(np.unique(arr))

"""Detectors for the five independent causes of time series irregularity.

A signal on its own can be unevenly sampled (non-constant intervals) or
partially observed (explicit NaN observations). Raggedness needs at least
two timestamp vectors to compare and splits into three independent forms:
ragged length (different observation counts), shift (one vector starts and
ends strictly before the other), and ragged sampling (positionally compared
intervals differ). None of the five implies any other; the test suite pins
the full independence matrix on minimal counterexamples.

Dataset-level detection compares signal pairs within each instance and, in
addition, the per-instance union timestamp vectors across instances. Two
instances that share no timestamp at all live on unrelated clocks; their
union vectors are compared by rank structure only (equal lengths compare
equal), so a dataset of equally long but independently clocked instances is
not flagged as shifted or raggedly sampled.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .core import IrregularDataset

__all__ = [
    "SignalTimestamps",
    "IrregularityProfile",
    "PairRaggedness",
    "is_unevenly_sampled",
    "is_partially_observed",
    "signal_pair_raggedness",
    "profile",
    "DEFAULT_REL_TOL",
]

# epoch-seconds conversions leave rounding noise well below this
DEFAULT_REL_TOL = 1e-9


class SignalTimestamps:
    """Strictly increasing timestamp vector of one signal plus its intervals."""

    __slots__ = ("ts", "__dict__")

    def __init__(self, ts):
        arr = np.asarray(ts, dtype=np.float64)
        if arr.ndim != 1:
            raise ValueError("timestamps must be one-dimensional")
        if arr.size > 1 and not np.all(np.diff(arr) > 0):
            raise ValueError("timestamps must be strictly increasing")
        arr = arr.copy()
        arr.flags.writeable = False
        self.ts = arr

    def __len__(self) -> int:
        return int(self.ts.size)

    @cached_property
    def deltas(self) -> np.ndarray:
        """Successive differences; empty for fewer than two observations."""
        return np.diff(self.ts)


@dataclass(frozen=True)
class PairRaggedness:
    ragged_length: bool
    shift: bool
    ragged_sampling: bool

    def any(self) -> bool:
        return self.ragged_length or self.shift or self.ragged_sampling


@dataclass(frozen=True)
class IrregularityProfile:
    """The five dataset-level irregularity flags."""

    unevenly_sampled: bool
    partially_observed: bool
    ragged_length: bool
    shift: bool
    ragged_sampling: bool

    _SHORT = (("US", "unevenly_sampled"), ("PO", "partially_observed"),
              ("UL", "ragged_length"), ("SH", "shift"), ("RS", "ragged_sampling"))

    def as_dict(self) -> dict[str, bool]:
        return {name: getattr(self, name) for _, name in self._SHORT}

    def __str__(self) -> str:
        return " ".join(f"{code}:{str(getattr(self, name)).lower()}"
                        for code, name in self._SHORT)


def _coerce(ts) -> SignalTimestamps:
    return ts if isinstance(ts, SignalTimestamps) else SignalTimestamps(ts)


def _intervals_differ(da: np.ndarray, db: np.ndarray, rel_tol: float) -> np.ndarray:
    # symmetric relative comparison, exact when rel_tol == 0
    return np.abs(da - db) > rel_tol * np.maximum(np.abs(da), np.abs(db))


def is_unevenly_sampled(ts, rel_tol: float = DEFAULT_REL_TOL) -> bool:
    """True iff some interval deviates from the first one beyond ``rel_tol``.

    Vectors with fewer than two intervals are never unevenly sampled.
    """
    deltas = _coerce(ts).deltas
    if deltas.size < 2:
        return False
    return bool(np.any(_intervals_differ(deltas[1:], deltas[0], rel_tol)))


def is_partially_observed(ds: IrregularDataset) -> bool:
    """True iff the dataset stores any explicit-NaN observation."""
    return bool(np.any(np.isnan(ds.tensor.values)))


def signal_pair_raggedness(a, b, rel_tol: float = DEFAULT_REL_TOL) -> PairRaggedness:
    """Compare two timestamp vectors for the three raggedness forms.

    Symmetric in its arguments: shift holds when either vector both starts
    and ends strictly before the other; ragged sampling compares only the
    intervals that exist in both vectors.
    """
    a, b = _coerce(a), _coerce(b)
    ragged_length = len(a) != len(b)
    shift = False
    if len(a) and len(b):
        shift = bool((a.ts[0] < b.ts[0] and a.ts[-1] < b.ts[-1])
                     or (b.ts[0] < a.ts[0] and b.ts[-1] < a.ts[-1]))
    m = min(a.deltas.size, b.deltas.size)
    ragged_sampling = bool(m and np.any(
        _intervals_differ(a.deltas[:m], b.deltas[:m], rel_tol)))
    return PairRaggedness(ragged_length, shift, ragged_sampling)


def _cross_instance_raggedness(vectors: list[np.ndarray],
                               rel_tol: float) -> PairRaggedness:
    """OR of pair raggedness over instance union vectors.

    Instances sharing no timestamp live on unrelated clocks and are compared
    by rank structure, where only a length mismatch can register; the global
    length scan covers that, so the pairwise loop only visits pairs sharing
    at least one timestamp.
    """
    ragged_length = len({v.size for v in vectors}) > 1
    shift = sampling = False
    observers: dict[float, list[int]] = {}
    for idx, v in enumerate(vectors):
        for t in v:
            group = observers.setdefault(float(t), [])
            if not group or group[-1] != idx:  # vectors are deduplicated
                group.append(idx)
    pairs: set[tuple[int, int]] = set()
    for group in observers.values():
        for x in range(len(group)):
            for y in range(x + 1, len(group)):
                pairs.add((group[x], group[y]))
    for x, y in pairs:
        r = signal_pair_raggedness(vectors[x], vectors[y], rel_tol)
        shift = shift or r.shift
        sampling = sampling or r.ragged_sampling
        if shift and sampling:
            break
    return PairRaggedness(ragged_length, shift, sampling)


def profile(ds: IrregularDataset, rel_tol: float = DEFAULT_REL_TOL) -> IrregularityProfile:
    """Detect all five irregularity flags for a dataset.

    Uneven sampling is evaluated on each instance's union timestamp vector;
    raggedness is the OR over within-instance signal pairs and
    cross-instance comparison of the union vectors.
    """
    n, d, _ = ds.tensor.shape
    union_vectors = [ds.instance_timestamps(i) for i in range(n)]
    uneven = any(is_unevenly_sampled(v, rel_tol) for v in union_vectors)

    ragged_length = shift = sampling = False
    for i in range(n):
        if ragged_length and shift and sampling:
            break
        sig_ts = [ds.signal_timestamps(i, j) for j in range(d)]
        for a in range(d):
            for b in range(a + 1, d):
                r = signal_pair_raggedness(sig_ts[a], sig_ts[b], rel_tol)
                ragged_length = ragged_length or r.ragged_length
                shift = shift or r.shift
                sampling = sampling or r.ragged_sampling
    if not (ragged_length and shift and sampling):
        cross = _cross_instance_raggedness(union_vectors, rel_tol)
        ragged_length = ragged_length or cross.ragged_length
        shift = shift or cross.shift
        sampling = sampling or cross.ragged_sampling

    return IrregularityProfile(
        unevenly_sampled=uneven,
        partially_observed=is_partially_observed(ds),
        ragged_length=ragged_length,
        shift=shift,
        ragged_sampling=sampling,
    )

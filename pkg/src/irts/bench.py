"""Micro-benchmark of the internal pipeline costs for one persisted dataset.

Measures wall-clock medians for loading from disk and for the minimally
ragged densification, next to the closed-form memory footprints of the
three representations and the actual file size. Runs serially so timings
stay honest.
"""

from __future__ import annotations

import json
import os
import time
from dataclasses import asdict, dataclass

from . import persist
from .densify import memory_estimate, to_dense_min_ragged

__all__ = ["BenchReport", "run_bench"]


@dataclass(frozen=True)
class BenchReport:
    dataset: str
    load_seconds: float
    convert_seconds: float
    disk_bytes: int
    sparse_bytes: int
    dense_min_bytes: int
    dense_full_bytes: int

    def as_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), sort_keys=True)


def _median(xs: list[float]) -> float:
    xs = sorted(xs)
    mid = len(xs) // 2
    return xs[mid] if len(xs) % 2 else 0.5 * (xs[mid - 1] + xs[mid])


def run_bench(ds_path: str | os.PathLike, repetitions: int = 3) -> BenchReport:
    """Benchmark loading and conversion of the dataset at ``ds_path``."""
    if repetitions < 1:
        raise ValueError("repetitions must be at least 1")
    load_times = []
    convert_times = []
    ds = None
    for _ in range(repetitions):
        t0 = time.perf_counter()
        ds = persist.load(ds_path)
        load_times.append(time.perf_counter() - t0)
        t0 = time.perf_counter()
        to_dense_min_ragged(ds)
        convert_times.append(time.perf_counter() - t0)
    return BenchReport(
        dataset=os.path.splitext(os.path.basename(os.fspath(ds_path)))[0],
        load_seconds=_median(load_times),
        convert_seconds=_median(convert_times),
        disk_bytes=os.path.getsize(ds_path),
        sparse_bytes=memory_estimate(ds, "sparse"),
        dense_min_bytes=memory_estimate(ds, "dense_min"),
        dense_full_bytes=memory_estimate(ds, "dense_full"),
    )

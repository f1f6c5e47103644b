"""Sparse coordinate container, statistics, and baselines for irregular time series."""

from .core import (
    CooEntry,
    IrregularDataset,
    Observation,
    ObservationKind,
    SparseIrregularTensor,
)
from .densify import DenseView, memory_estimate, rank_positions, to_dense_full, \
    to_dense_min_ragged
from .errors import (
    CapacityError,
    DataError,
    FormatError,
    IntegrityError,
    IrtsError,
    NotFoundError,
    SchemaError,
)
from .index import TimestampIndex, build_index
from .ingest import CsvSchema, LongRow, export_long, ingest_long, read_long_csv, \
    write_long_csv
from .persist import load, save
from .stats import DatasetStats, class_unbalance, dataset_summary, missing_ratio, \
    sampling_cv
from .synth import AbfConfig, generate_abf
from .taxonomy import (
    IrregularityProfile,
    SignalTimestamps,
    is_partially_observed,
    is_unevenly_sampled,
    profile,
    signal_pair_raggedness,
)

__version__ = "0.1.0"

__all__ = [
    "AbfConfig",
    "CapacityError",
    "CooEntry",
    "CsvSchema",
    "DataError",
    "DatasetStats",
    "DenseView",
    "FormatError",
    "IntegrityError",
    "IrregularDataset",
    "IrregularityProfile",
    "IrtsError",
    "LongRow",
    "NotFoundError",
    "Observation",
    "ObservationKind",
    "SchemaError",
    "SignalTimestamps",
    "SparseIrregularTensor",
    "TimestampIndex",
    "build_index",
    "class_unbalance",
    "dataset_summary",
    "export_long",
    "generate_abf",
    "ingest_long",
    "is_partially_observed",
    "is_unevenly_sampled",
    "load",
    "memory_estimate",
    "missing_ratio",
    "profile",
    "rank_positions",
    "read_long_csv",
    "save",
    "signal_pair_raggedness",
    "to_dense_full",
    "to_dense_min_ragged",
    "write_long_csv",
    "__version__",
]

"""Long-format ingestion and export.

A long-format stream carries one observation per row: instance id, signal
id, timestamp, value, plus optional extra fields that become per-instance
static attributes. Construction is two-pass: the first pass registers
instance and signal identifiers (first-appearance order fixes their
ordinals) and collects the distinct timestamps into the index; the second
pass emits one tensor entry per observation row with the timestamp replaced
by its index position.

Besides observation rows the stream may carry *declaration rows*, which
have no value and register identifiers or timestamps without storing an
entry. They make the long format total: instances or signals without any
observation, and index timestamps no entry references, survive an
export/ingest round trip. :func:`export_long` emits a declaration manifest
ahead of the entry rows so ordinals are reproduced exactly.

On the CSV wire a declaration row simply leaves the value cell (and, for
id declarations, the timestamp cell) empty. Observation rows with a value
cell matching a configured missing token become explicit-NaN entries.
"""

from __future__ import annotations

import csv
import math
import os
from dataclasses import dataclass
from datetime import datetime, timezone
from typing import Any, Iterable, Iterator, NamedTuple

import numpy as np

from .core import IrregularDataset, SparseIrregularTensor
from .errors import DataError, SchemaError
from .index import build_index

__all__ = [
    "LongRow",
    "CsvSchema",
    "parse_timestamp",
    "ingest_long",
    "read_long_csv",
    "export_long",
    "write_long_csv",
]


class LongRow(NamedTuple):
    """One long-format row.

    Observation rows have both ids non-empty and a parseable timestamp;
    ``value`` may be a float (NaN allowed), ``None``, or a missing token.
    Declaration rows have ``value is None`` and at least one of
    ``instance_id``/``signal_id``/``timestamp`` set; they register ids and
    timestamps without creating entries.
    """

    instance_id: str
    signal_id: str
    timestamp: float | str | None
    value: float | str | None
    extras: dict[str, Any] | None = None


@dataclass(frozen=True)
class CsvSchema:
    """Column roles and parsing policy for long-format CSV files."""

    instance_col: str = "ts_id"
    signal_col: str = "signal_id"
    timestamp_col: str = "timestamp"
    value_col: str = "value"
    delimiter: str = ","
    missing_tokens: tuple[str, ...] = ("", "NaN", "nan")
    timestamp_decimals: int | None = None
    duplicate_policy: str = "error"  # or "last-wins"

    def __post_init__(self):
        roles = (self.instance_col, self.signal_col, self.timestamp_col, self.value_col)
        if len(set(roles)) != 4:
            raise SchemaError(f"role columns must be distinct, got {roles}")
        if self.duplicate_policy not in ("error", "last-wins"):
            raise ValueError(f"unknown duplicate policy {self.duplicate_policy!r}")


def parse_timestamp(raw: float | str) -> float:
    """Parse a timestamp to a finite float (ISO-8601 becomes epoch seconds).

    Naive ISO timestamps are interpreted as UTC; a trailing ``Z`` and
    numeric offsets are honored.
    """
    if isinstance(raw, str):
        text = raw.strip()
        try:
            t = float(text)
        except ValueError:
            try:
                dt = datetime.fromisoformat(text.replace("Z", "+00:00"))
            except ValueError:
                raise DataError(f"cannot parse timestamp {raw!r}") from None
            if dt.tzinfo is None:
                dt = dt.replace(tzinfo=timezone.utc)
            t = dt.timestamp()
    else:
        t = float(raw)
    if not math.isfinite(t):
        raise DataError(f"timestamp {raw!r} is not finite")
    return t


def _parse_value(raw: float | str | None, missing_tokens: tuple[str, ...]) -> float:
    if raw is None:
        return math.nan
    if isinstance(raw, str):
        if raw in missing_tokens:
            return math.nan
        try:
            return float(raw)
        except ValueError:
            raise DataError(f"cannot parse value {raw!r}") from None
    return float(raw)


def _sniff_cell(text: str) -> Any:
    """Type an attribute cell: int, then float, else string."""
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


class _NormalRow(NamedTuple):
    instance_id: str
    signal_id: str
    timestamp: float | None     # None only on id declarations
    value: float | None         # None on all declarations
    extras: dict[str, Any] | None


def _normalize(row, rownum: int, schema: CsvSchema) -> _NormalRow:
    if isinstance(row, LongRow):
        inst, sig, ts, val, extras = row
    else:
        parts = tuple(row)
        if len(parts) == 4:
            inst, sig, ts, val = parts
            extras = None
        elif len(parts) == 5:
            inst, sig, ts, val, extras = parts
        else:
            raise DataError(f"row {rownum}: expected 4 or 5 fields, got {len(parts)}")
    inst = "" if inst is None else str(inst)
    sig = "" if sig is None else str(sig)
    try:
        t = None if ts is None else parse_timestamp(ts)
    except DataError as exc:
        raise DataError(f"row {rownum}: {exc}") from None
    if t is not None and schema.timestamp_decimals is not None:
        t = round(t, schema.timestamp_decimals)
    if val is None:
        if not inst and not sig and t is None:
            raise DataError(f"row {rownum}: empty row")
        return _NormalRow(inst, sig, t, None, dict(extras) if extras else None)
    if not inst or not sig:
        raise DataError(f"row {rownum}: observation rows need both instance and "
                        f"signal ids")
    if t is None:
        raise DataError(f"row {rownum}: observation rows need a timestamp")
    try:
        x = _parse_value(val, schema.missing_tokens)
    except DataError as exc:
        raise DataError(f"row {rownum}: {exc}") from None
    return _NormalRow(inst, sig, t, x, dict(extras) if extras else None)


def ingest_long(rows: Iterable, schema: CsvSchema | None = None) -> IrregularDataset:
    """Build an :class:`IrregularDataset` from a replayable long-format source.

    ``rows`` must be iterable twice (a list, or a source that reopens its
    file per iteration) and may yield :class:`LongRow` instances or plain
    4/5-tuples. Instance and signal ordinals follow first appearance;
    ``extras`` become static attributes and must be constant per instance.

    Raises
    ------
    DataError
        On unparseable rows, conflicting static attributes, or duplicate
        coordinates under the ``"error"`` duplicate policy.
    """
    schema = schema or CsvSchema()
    if iter(rows) is rows:
        rows = list(rows)  # one-shot iterator: buffer so the second pass sees it

    inst_ord: dict[str, int] = {}
    sig_ord: dict[str, int] = {}
    stamps: set[float] = set()
    for rownum, raw in enumerate(rows, start=1):
        r = _normalize(raw, rownum, schema)
        if r.instance_id and r.instance_id not in inst_ord:
            inst_ord[r.instance_id] = len(inst_ord)
        if r.signal_id and r.signal_id not in sig_ord:
            sig_ord[r.signal_id] = len(sig_ord)
        if r.timestamp is not None:
            stamps.add(r.timestamp)
    index = build_index(np.fromiter(stamps, dtype=np.float64, count=len(stamps)))

    ii: list[int] = []
    jj: list[int] = []
    kk: list[int] = []
    xx: list[float] = []
    attrs_by_instance: dict[int, dict[str, Any]] = {}
    for rownum, raw in enumerate(rows, start=1):
        r = _normalize(raw, rownum, schema)
        if r.extras and r.instance_id:
            acc = attrs_by_instance.setdefault(inst_ord[r.instance_id], {})
            for key, v in r.extras.items():
                if key in acc and acc[key] != v:
                    raise DataError(
                        f"row {rownum}: static attribute {key!r} of instance "
                        f"{r.instance_id!r} changed from {acc[key]!r} to {v!r}")
                acc[key] = v
        if r.value is None:
            continue
        ii.append(inst_ord[r.instance_id])
        jj.append(sig_ord[r.signal_id])
        kk.append(index.position_of(r.timestamp))
        xx.append(r.value)

    tensor = SparseIrregularTensor.from_arrays(
        (len(inst_ord), len(sig_ord), len(index)), ii, jj, kk, xx,
        duplicate_policy=schema.duplicate_policy)
    keys = sorted({k for acc in attrs_by_instance.values() for k in acc})
    attrs = {key: tuple(attrs_by_instance.get(i, {}).get(key)
                        for i in range(len(inst_ord)))
             for key in keys}
    return IrregularDataset(tensor, index, list(inst_ord), list(sig_ord), attrs)


class CsvRowSource:
    """Replayable long-format row source backed by a CSV file.

    Reopens and re-parses the file on every iteration, so memory stays
    bounded per row. Header validation happens on first access.
    """

    def __init__(self, path: str | os.PathLike, schema: CsvSchema | None = None):
        self.path = os.fspath(path)
        self.schema = schema or CsvSchema()

    def __iter__(self) -> Iterator[LongRow]:
        schema = self.schema
        with open(self.path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh, delimiter=schema.delimiter)
            try:
                header = next(reader)
            except StopIteration:
                raise SchemaError(f"{self.path}: empty file, header expected") from None
            col = {name: pos for pos, name in enumerate(header)}
            missing = [c for c in (schema.instance_col, schema.signal_col,
                                   schema.timestamp_col, schema.value_col)
                       if c not in col]
            if missing:
                raise SchemaError(f"{self.path}: missing columns {missing}")
            extra_cols = [name for name in header
                          if name not in {schema.instance_col, schema.signal_col,
                                          schema.timestamp_col, schema.value_col}]
            for lineno, cells in enumerate(reader, start=2):
                if not cells:
                    continue
                if len(cells) != len(header):
                    raise DataError(f"{self.path}:{lineno}: expected "
                                    f"{len(header)} cells, got {len(cells)}")
                ts_cell = cells[col[schema.timestamp_col]]
                val_cell = cells[col[schema.value_col]]
                inst = cells[col[schema.instance_col]]
                sig = cells[col[schema.signal_col]]
                extras = {name: _sniff_cell(cells[col[name]])
                          for name in extra_cols if cells[col[name]] != ""}
                declaration = val_cell == "" and (ts_cell == "" or not (inst and sig))
                try:
                    if declaration:
                        ts = None if ts_cell == "" else parse_timestamp(ts_cell)
                        yield LongRow(inst, sig, ts, None, extras or None)
                    else:
                        yield LongRow(inst, sig, parse_timestamp(ts_cell),
                                      _parse_value(val_cell, schema.missing_tokens),
                                      extras or None)
                except DataError as exc:
                    raise DataError(f"{self.path}:{lineno}: {exc}") from None


def read_long_csv(path: str | os.PathLike,
                  schema: CsvSchema | None = None) -> CsvRowSource:
    """Open a long-format CSV as a replayable row source (streaming)."""
    source = CsvRowSource(path, schema)
    if not os.path.exists(source.path):
        raise FileNotFoundError(source.path)
    return source


def export_long(ds: IrregularDataset) -> Iterator[LongRow]:
    """Stream a dataset back to long format.

    Emits a declaration manifest first (each instance with its static
    attributes, each signal, and any index timestamp no entry references),
    then one observation row per stored entry in (instance, signal, time)
    order. Ingesting the stream reconstructs an equal dataset.
    """
    for i, iid in enumerate(ds.instance_ids):
        yield LongRow(iid, "", None, None, ds.instance_attributes(i) or None)
    for sid in ds.signal_ids:
        yield LongRow("", sid, None, None, None)
    t = ds.tensor
    referenced = np.zeros(len(ds.index), dtype=bool)
    referenced[t.time_idx] = True
    for k in np.flatnonzero(~referenced):
        yield LongRow("", "", ds.index.timestamp_of(int(k)), None, None)
    for entry in t:
        yield LongRow(ds.instance_ids[entry.instance_idx],
                      ds.signal_ids[entry.signal_idx],
                      ds.index.timestamp_of(entry.time_idx),
                      entry.value, None)


def _format_cell(v: Any) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        if math.isnan(v):
            return "NaN"
        return repr(v)
    return str(v)


def write_long_csv(ds: IrregularDataset, path: str | os.PathLike,
                   schema: CsvSchema | None = None) -> None:
    """Write :func:`export_long` output as CSV, attribute keys as extra columns."""
    schema = schema or CsvSchema()
    attr_cols = sorted(ds.static_attributes)
    clash = set(attr_cols) & {schema.instance_col, schema.signal_col,
                              schema.timestamp_col, schema.value_col}
    if clash:
        raise SchemaError(f"attribute names collide with role columns: {sorted(clash)}")
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, delimiter=schema.delimiter, lineterminator="\n")
        writer.writerow([schema.instance_col, schema.signal_col,
                         schema.timestamp_col, schema.value_col, *attr_cols])
        for row in export_long(ds):
            extras = row.extras or {}
            writer.writerow([
                row.instance_id, row.signal_id,
                "" if row.timestamp is None else _format_cell(float(row.timestamp)),
                "" if row.value is None else _format_cell(row.value),
                *(_format_cell(extras.get(c)) for c in attr_cols),
            ])

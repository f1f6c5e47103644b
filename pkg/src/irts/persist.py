"""Self-contained binary persistence for irregular time series datasets.

File layout (all little-endian)::

    magic           4 bytes   b"IRTS"
    version         u16       1
    reserved        u16       0
    n, d, t, nnz    u64 x 4   dimensions and stored entry count
    instance_idx    u64[nnz]
    signal_idx      u64[nnz]
    time_idx        u64[nnz]
    values          f64[nnz]  NaN written as the canonical quiet-NaN pattern
    timestamps      f64[t]
    metadata_len    u64
    metadata        UTF-8 JSON (keys sorted): instance_ids, signal_ids,
                    static_attributes, notes
    crc32           u32       over all preceding bytes

Serialization is canonical: identical datasets produce byte-identical
files. Entries are written in (instance, signal, time) order, which load
verifies before trusting.
"""

from __future__ import annotations

import json
import os
import struct
import zlib

import numpy as np

from .core import IrregularDataset, SparseIrregularTensor
from .errors import FormatError, IntegrityError
from .index import TimestampIndex

__all__ = ["save", "load", "MAGIC", "VERSION"]

MAGIC = b"IRTS"
VERSION = 1

_HEADER = struct.Struct("<4sHHQQQQ")
_CANONICAL_NAN = np.frombuffer(struct.pack("<Q", 0x7FF8000000000000), dtype="<f8")[0]
_NOTES = "sparse COO irregular time series container"


def _encode(ds: IrregularDataset) -> bytes:
    n, d, t_count = ds.tensor.shape
    t = ds.tensor
    values = t.values.astype("<f8")
    values[np.isnan(values)] = _CANONICAL_NAN
    meta = {
        "instance_ids": list(ds.instance_ids),
        "signal_ids": list(ds.signal_ids),
        "static_attributes": {k: list(v) for k, v in ds.static_attributes.items()},
        "notes": _NOTES,
    }
    meta_blob = json.dumps(meta, sort_keys=True, separators=(",", ":"),
                           allow_nan=False).encode("utf-8")
    parts = [
        _HEADER.pack(MAGIC, VERSION, 0, n, d, t_count, t.nnz),
        t.instance_idx.astype("<u8").tobytes(),
        t.signal_idx.astype("<u8").tobytes(),
        t.time_idx.astype("<u8").tobytes(),
        values.tobytes(),
        ds.index.timestamps.astype("<f8").tobytes(),
        struct.pack("<Q", len(meta_blob)),
        meta_blob,
    ]
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body))


def save(ds: IrregularDataset, path: str | os.PathLike) -> None:
    """Serialize ``ds`` to ``path`` in the documented binary format."""
    blob = _encode(ds)
    with open(path, "wb") as fh:
        fh.write(blob)


class _Cursor:
    def __init__(self, blob: bytes):
        self.blob = blob
        self.pos = 0

    def take(self, nbytes: int, section: str) -> bytes:
        if self.pos + nbytes > len(self.blob):
            raise FormatError(f"file truncated in section {section!r}")
        out = self.blob[self.pos:self.pos + nbytes]
        self.pos += nbytes
        return out

    def take_array(self, count: int, dtype: str, section: str) -> np.ndarray:
        raw = self.take(count * np.dtype(dtype).itemsize, section)
        return np.frombuffer(raw, dtype=dtype).copy()


def load(path: str | os.PathLike) -> IrregularDataset:
    """Read a dataset back from ``path``.

    Raises
    ------
    FormatError
        Bad magic, unsupported version, truncated section, or inconsistent
        content (including unsorted entries).
    IntegrityError
        Structurally valid file whose checksum does not match.
    """
    with open(path, "rb") as fh:
        blob = fh.read()
    cur = _Cursor(blob)
    header = cur.take(_HEADER.size, "header")
    magic, version, reserved, n, d, t_count, nnz = _HEADER.unpack(header)
    if magic != MAGIC:
        raise FormatError(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise FormatError(f"unsupported format version {version}")
    if reserved != 0:
        raise FormatError(f"reserved header field is {reserved}, expected 0")
    instance_idx = cur.take_array(nnz, "<u8", "instance_idx")
    signal_idx = cur.take_array(nnz, "<u8", "signal_idx")
    time_idx = cur.take_array(nnz, "<u8", "time_idx")
    values = cur.take_array(nnz, "<f8", "values")
    timestamps = cur.take_array(t_count, "<f8", "timestamps")
    (meta_len,) = struct.unpack("<Q", cur.take(8, "metadata_len"))
    meta_blob = cur.take(meta_len, "metadata")
    crc_stored = struct.unpack("<I", cur.take(4, "checksum"))[0]
    if cur.pos != len(blob):
        raise FormatError(f"{len(blob) - cur.pos} trailing bytes after checksum")
    if zlib.crc32(blob[:-4]) != crc_stored:
        raise IntegrityError("checksum mismatch")

    try:
        meta = json.loads(meta_blob.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"metadata is not valid JSON: {exc}") from None
    for key in ("instance_ids", "signal_ids", "static_attributes"):
        if key not in meta:
            raise FormatError(f"metadata misses key {key!r}")
    attrs = {k: tuple(v) for k, v in meta["static_attributes"].items()}

    try:
        tensor = SparseIrregularTensor(
            (n, d, t_count),
            instance_idx.astype(np.int64), signal_idx.astype(np.int64),
            time_idx.astype(np.int64), values)
        index = TimestampIndex(timestamps)
        return IrregularDataset(tensor, index, meta["instance_ids"],
                                meta["signal_ids"], attrs)
    except Exception as exc:
        raise FormatError(f"inconsistent file content: {exc}") from None

"""Command-line surface: ingest, inspect, convert, generate, classify, bench.

Exit codes: 0 on success, 1 on data/file errors (one-line message on
stderr), 2 on usage errors. Randomized commands require an explicit
``--seed``; nothing falls back to a time-based seed.
"""

from __future__ import annotations

import argparse
import json
import os
import re
import sys

import numpy as np

from . import bench as bench_mod
from . import persist
from .baseline import SkewRule, f1_macro, knn_predict, labeled_split
from .densify import DEFAULT_MAX_CELLS, to_dense_full, to_dense_min_ragged
from .errors import IrtsError
from .ingest import CsvSchema, ingest_long, read_long_csv, write_long_csv
from .stats import dataset_summary
from .synth import AbfConfig, generate_abf
from .taxonomy import DEFAULT_REL_TOL, profile

__all__ = ["run", "main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="irts", description="Sparse container tools for irregular time series.")
    parser.add_argument("--quiet", action="store_true",
                        help="suppress non-essential output")
    # accepted before or after the subcommand; SUPPRESS keeps the subparser
    # from clobbering a value parsed at the top level
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", parents=[common],
                       help="build a dataset from a long-format CSV")
    p.add_argument("--csv", required=True, metavar="PATH")
    p.add_argument("--out", required=True, metavar="DS.irts")
    p.add_argument("--instance-col", default="ts_id")
    p.add_argument("--signal-col", default="signal_id")
    p.add_argument("--ts-col", default="timestamp")
    p.add_argument("--value-col", default="value")
    p.add_argument("--delimiter", default=",")
    p.add_argument("--missing-token", action="append", default=None,
                   help="value token treated as explicit missing (repeatable)")
    p.add_argument("--quantize-decimals", type=int, default=None,
                   help="round timestamps to this many decimals before indexing")
    p.add_argument("--dup-policy", choices=["error", "last-wins"], default="error")

    p = sub.add_parser("info", parents=[common], help="dimensions and sparsity of a dataset")
    p.add_argument("dataset", metavar="DS.irts")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("stats", parents=[common], help="summary statistics of a dataset")
    p.add_argument("dataset", metavar="DS.irts")
    p.add_argument("--csv", action="store_true", help="emit a single-row CSV")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("detect", parents=[common], help="irregularity flags of a dataset")
    p.add_argument("dataset", metavar="DS.irts")
    p.add_argument("--tol", type=float, default=DEFAULT_REL_TOL,
                   help="relative tolerance for interval comparison")
    p.add_argument("--json", action="store_true")

    p = sub.add_parser("densify", parents=[common], help="write dense CSV matrices")
    p.add_argument("dataset", metavar="DS.irts")
    p.add_argument("--out", required=True, metavar="CSVDIR")
    p.add_argument("--full", action="store_true",
                   help="use the full global time axis instead of ranking")
    p.add_argument("--max-cells", type=int, default=DEFAULT_MAX_CELLS)

    p = sub.add_parser("export", parents=[common], help="write a dataset back to long-format CSV")
    p.add_argument("dataset", metavar="DS.irts")
    p.add_argument("--out", required=True, metavar="long.csv")

    p = sub.add_parser("synth", help="generate a synthetic dataset")
    synth_sub = p.add_subparsers(dest="generator", required=True)
    p = synth_sub.add_parser("abf", parents=[common], help="three classes encoded in interval skewness")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, metavar="DS.irts")
    p.add_argument("--gamma", type=float, default=3.0)
    p.add_argument("--per-class-train", type=int, default=10)
    p.add_argument("--per-class-test", type=int, default=300)
    p.add_argument("--length", type=int, default=128)

    p = sub.add_parser("classify", help="run a baseline classifier on the test split")
    clf_sub = p.add_subparsers(dest="model", required=True)
    knn = clf_sub.add_parser("knn", parents=[common], help="k nearest neighbors with banded DTW")
    knn.add_argument("dataset", metavar="DS.irts")
    knn.add_argument("--train-split", action="store_true",
                     help="fit on the stored train split (the only supported mode)")
    knn.add_argument("--k", type=int, default=1)
    knn.add_argument("--band", type=int, default=10)
    skew = clf_sub.add_parser("skew", parents=[common], help="interval-skewness threshold rule")
    skew.add_argument("dataset", metavar="DS.irts")

    p = sub.add_parser("bench", parents=[common], help="time loading and densification")
    p.add_argument("dataset", metavar="DS.irts")
    p.add_argument("--reps", type=int, default=3)
    p.add_argument("--json", action="store_true")

    return parser


def _say(args, message: str) -> None:
    if not args.quiet:
        print(message)


def _cmd_ingest(args) -> int:
    schema = CsvSchema(
        instance_col=args.instance_col, signal_col=args.signal_col,
        timestamp_col=args.ts_col, value_col=args.value_col,
        delimiter=args.delimiter,
        missing_tokens=tuple(args.missing_token) if args.missing_token
        else CsvSchema.missing_tokens,
        timestamp_decimals=args.quantize_decimals,
        duplicate_policy=args.dup_policy)
    ds = ingest_long(read_long_csv(args.csv, schema), schema)
    persist.save(ds, args.out)
    _say(args, f"wrote {args.out}: {ds!r}")
    return 0


def _cmd_info(args) -> int:
    ds = persist.load(args.dataset)
    n, d, t_count = ds.tensor.shape
    cells = n * d * t_count
    payload = {
        "n_instances": n, "n_signals": d, "n_timestamps": t_count,
        "nnz": ds.nnz, "sparsity": ds.nnz / cells if cells else 0.0,
    }
    if args.json:
        print(json.dumps(payload, sort_keys=True))
    else:
        for key, value in payload.items():
            print(f"{key}: {value:.6f}" if isinstance(value, float) else f"{key}: {value}")
    return 0


def _cmd_stats(args) -> int:
    summary = dataset_summary(persist.load(args.dataset))
    if args.json:
        print(json.dumps(summary.as_dict(), sort_keys=True))
    elif args.csv:
        print(summary.to_csv(), end="")
    else:
        for key, value in summary.as_dict().items():
            print(f"{key}: {value if value is not None else '-'}")
    return 0


def _cmd_detect(args) -> int:
    flags = profile(persist.load(args.dataset), rel_tol=args.tol)
    print(json.dumps(flags.as_dict(), sort_keys=True) if args.json else str(flags))
    return 0


def _safe_name(name: str) -> str:
    return re.sub(r"[^A-Za-z0-9_.-]", "_", name) or "_"


def _write_matrix_csv(path: str, header: list[str], ids, matrix) -> None:
    import csv as _csv

    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = _csv.writer(fh, lineterminator="\n")
        writer.writerow(["instance_id", *header])
        for iid, row in zip(ids, matrix):
            writer.writerow([iid, *("" if np.isnan(v) else repr(float(v)) for v in row)])


def _cmd_densify(args) -> int:
    ds = persist.load(args.dataset)
    os.makedirs(args.out, exist_ok=True)
    if args.full:
        tensor = to_dense_full(ds, max_cells=args.max_cells)
        header = [repr(float(t)) for t in ds.index.timestamps]
        for j, sid in enumerate(ds.signal_ids):
            _write_matrix_csv(os.path.join(args.out, f"values_full_{_safe_name(sid)}.csv"),
                              header, ds.instance_ids, tensor[:, j, :])
    else:
        view = to_dense_min_ragged(ds)
        header = [f"slot_{r}" for r in range(view.max_len)]
        for j, sid in enumerate(ds.signal_ids):
            _write_matrix_csv(os.path.join(args.out, f"values_{_safe_name(sid)}.csv"),
                              header, ds.instance_ids, view.values[:, j, :])
        _write_matrix_csv(os.path.join(args.out, "slot_timestamps.csv"),
                          header, ds.instance_ids, view.slot_timestamps)
    _say(args, f"wrote dense matrices to {args.out}")
    return 0


def _cmd_export(args) -> int:
    write_long_csv(persist.load(args.dataset), args.out)
    _say(args, f"wrote {args.out}")
    return 0


def _cmd_synth(args) -> int:
    cfg = AbfConfig(seed=args.seed, per_class_train=args.per_class_train,
                    per_class_test=args.per_class_test, series_length=args.length,
                    skew_strength=args.gamma)
    ds = generate_abf(cfg)
    persist.save(ds, args.out)
    _say(args, f"wrote {args.out}: {ds!r}")
    return 0


def _cmd_classify(args) -> int:
    ds = persist.load(args.dataset)
    train, test = labeled_split(ds)
    if args.model == "knn":
        predictions = knn_predict(train, test, k=args.k, band=args.band)
    else:
        predictions = SkewRule.fit(train).predict(test)
    print(f"macro_f1: {f1_macro(test.labels, predictions):.4f}")
    return 0


def _cmd_bench(args) -> int:
    report = bench_mod.run_bench(args.dataset, repetitions=args.reps)
    if args.json:
        print(report.to_json())
    else:
        for key, value in report.as_dict().items():
            print(f"{key}: {value:.6f}" if isinstance(value, float) else f"{key}: {value}")
    return 0


_HANDLERS = {
    "ingest": _cmd_ingest,
    "info": _cmd_info,
    "stats": _cmd_stats,
    "detect": _cmd_detect,
    "densify": _cmd_densify,
    "export": _cmd_export,
    "synth": _cmd_synth,
    "classify": _cmd_classify,
    "bench": _cmd_bench,
}


def run(argv: list[str] | None = None) -> int:
    """Parse ``argv`` and execute; returns the process exit code."""
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except (IrtsError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run(sys.argv[1:]))

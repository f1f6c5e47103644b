import json

import pytest

from irts.bench import run_bench
from irts.densify import memory_estimate
from irts.persist import load, save
from irts.synth import AbfConfig, generate_abf


@pytest.fixture(scope="module")
def ds_path(tmp_path_factory):
    path = tmp_path_factory.mktemp("bench") / "abf.irts"
    save(generate_abf(AbfConfig(seed=1, per_class_train=2, per_class_test=4,
                                series_length=32)), path)
    return path


def test_report_fields(ds_path):
    report = run_bench(ds_path, repetitions=3)
    assert report.dataset == "abf"
    assert report.load_seconds >= 0 and report.convert_seconds >= 0
    assert report.disk_bytes == ds_path.stat().st_size
    ds = load(ds_path)
    assert report.sparse_bytes == 4 * ds.nnz * 8
    assert report.dense_min_bytes == memory_estimate(ds, "dense_min")
    assert report.dense_full_bytes >= report.dense_min_bytes


def test_report_json(ds_path):
    payload = json.loads(run_bench(ds_path, repetitions=1).to_json())
    assert set(payload) == {"dataset", "load_seconds", "convert_seconds",
                            "disk_bytes", "sparse_bytes", "dense_min_bytes",
                            "dense_full_bytes"}


def test_repetitions_validated(ds_path):
    with pytest.raises(ValueError):
        run_bench(ds_path, repetitions=0)


def test_byte_fields_reproducible(ds_path):
    a = run_bench(ds_path, repetitions=1)
    b = run_bench(ds_path, repetitions=1)
    assert (a.disk_bytes, a.sparse_bytes, a.dense_min_bytes, a.dense_full_bytes) == \
        (b.disk_bytes, b.sparse_bytes, b.dense_min_bytes, b.dense_full_bytes)

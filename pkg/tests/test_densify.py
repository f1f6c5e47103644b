import math

import numpy as np
import pytest

from helpers import densify_oracle, make_random_dataset
from irts.core import IrregularDataset, SparseIrregularTensor
from irts.densify import (
    memory_estimate,
    rank_positions,
    to_dense_full,
    to_dense_min_ragged,
)
from irts.errors import CapacityError
from irts.index import build_index
from irts.ingest import ingest_long


def test_rank_positions_consecutive():
    assert rank_positions([2, 5, 7]) == {2: 1, 5: 2, 7: 3}
    assert rank_positions([0]) == {0: 1}
    assert rank_positions([]) == {}


def test_rank_positions_rejects_unsorted():
    with pytest.raises(ValueError):
        rank_positions([5, 2])
    with pytest.raises(ValueError):
        rank_positions([2, 2])


def two_signal_instance():
    # signal 0 observes slots 0..2, signal 1 only the first two union slots
    return ingest_long([("i", "s0", 0.0, 10.0), ("i", "s0", 1.0, 11.0),
                        ("i", "s0", 2.0, 12.0),
                        ("i", "s1", 0.0, 20.0), ("i", "s1", 1.0, 21.0)])


def test_min_ragged_example():
    view = to_dense_min_ragged(two_signal_instance())
    assert view.max_len == 3
    np.testing.assert_array_equal(view.values[0, 0], [10.0, 11.0, 12.0])
    np.testing.assert_array_equal(view.values[0, 1, :2], [20.0, 21.0])
    assert math.isnan(view.values[0, 1, 2])
    np.testing.assert_array_equal(view.slot_timestamps[0], [0.0, 1.0, 2.0])


def test_min_ragged_shifted_signals_rank_over_union():
    # signal a at [t1, t2], signal b at [t2, t3]: ranking is per instance
    # over the union, so the instance densifies to width 3, not 2
    ds = ingest_long([("i", "a", 1.0, 1.5), ("i", "a", 2.0, 2.5),
                      ("i", "b", 2.0, 7.5), ("i", "b", 3.0, 8.5)])
    view = to_dense_min_ragged(ds)
    assert view.max_len == 3
    np.testing.assert_array_equal(view.values[0, 0, :2], [1.5, 2.5])
    assert math.isnan(view.values[0, 0, 2])
    assert math.isnan(view.values[0, 1, 0])
    np.testing.assert_array_equal(view.values[0, 1, 1:], [7.5, 8.5])


def test_min_ragged_empty_dataset():
    ds = ingest_long([])
    view = to_dense_min_ragged(ds)
    assert view.values.shape == (0, 0, 0)
    assert view.max_len == 0


def test_min_ragged_explicit_nan_occupies_slot():
    ds = ingest_long([("i", "a", 0.0, "NaN"), ("i", "a", 1.0, 5.0)])
    view = to_dense_min_ragged(ds)
    assert view.max_len == 2
    assert math.isnan(view.values[0, 0, 0])
    assert view.values[0, 0, 1] == 5.0
    np.testing.assert_array_equal(view.slot_timestamps[0], [0.0, 1.0])


def assert_view_equals_oracle(ds):
    view = to_dense_min_ragged(ds)
    values, slots, max_len = densify_oracle(ds)
    assert view.max_len == max_len
    np.testing.assert_array_equal(view.values, values)
    np.testing.assert_array_equal(view.slot_timestamps, slots)


def test_min_ragged_matches_brute_force_oracle():
    rng = np.random.default_rng(3)
    for _ in range(60):
        assert_view_equals_oracle(make_random_dataset(rng, max_n=8, max_d=8, max_t=8))


def test_order_preservation_and_count_conservation():
    rng = np.random.default_rng(4)
    for _ in range(30):
        ds = make_random_dataset(rng)
        view = to_dense_min_ragged(ds)
        finite_entries = int(np.sum(~np.isnan(ds.tensor.values)))
        assert int(np.sum(~np.isnan(view.values))) == finite_entries
        for i in range(ds.n_instances):
            for j in range(ds.n_signals):
                row = view.values[i, j]
                recovered = row[~np.isnan(row)]
                ks = ds.observed_positions(i, j)
                expected = [ds.get_value(i, j, int(k)).value for k in ks
                            if ds.get_value(i, j, int(k)).is_observed]
                np.testing.assert_array_equal(recovered, expected)


def test_slot_timestamps_strictly_increasing_then_nan():
    rng = np.random.default_rng(5)
    for _ in range(20):
        ds = make_random_dataset(rng)
        view = to_dense_min_ragged(ds)
        for i in range(ds.n_instances):
            row = view.slot_timestamps[i]
            t_i = len(ds.observed_positions(i))
            head = row[:t_i]
            assert not np.any(np.isnan(head))
            assert np.all(np.diff(head) > 0) if t_i > 1 else True
            assert np.all(np.isnan(row[t_i:]))


def test_full_densify_places_at_global_positions():
    tensor = SparseIrregularTensor.from_entries((1, 1, 10), [(0, 0, 5, 3.5)])
    ds = IrregularDataset(tensor, build_index(np.arange(10.0)), ["a"], ["s"])
    full = to_dense_full(ds)
    assert full.shape == (1, 1, 10)
    assert full[0, 0, 5] == 3.5
    assert int(np.isnan(full).sum()) == 9


def test_full_densify_guard():
    tensor = SparseIrregularTensor.from_entries((2, 2, 10), [])
    ds = IrregularDataset(tensor, build_index(np.arange(10.0)),
                          ["a", "b"], ["s", "t"])
    with pytest.raises(CapacityError) as err:
        to_dense_full(ds, max_cells=10)
    assert err.value.required_cells == 40


def test_full_equals_min_ragged_when_single_instance_covers_index():
    ds = ingest_long([("i", "a", 0.0, 1.0), ("i", "a", 1.0, 2.0),
                      ("i", "b", 2.0, 3.0)])
    np.testing.assert_array_equal(to_dense_full(ds),
                                  to_dense_min_ragged(ds).values)


def test_memory_estimates():
    rows = [("A", "s", float(t), 1.0) for t in range(25)]
    rows += [("B", "s", float(t), 1.0) for t in range(75)]
    ds = ingest_long(rows)
    assert ds.nnz == 100
    assert memory_estimate(ds, "sparse") == 3200
    assert memory_estimate(ds, "dense_min") == 2 * 1 * 75 * 8
    assert memory_estimate(ds, "dense_full") == 2 * 1 * 75 * 8


def test_memory_estimate_dense_min_fixture():
    # n=2, d=2, per-instance max 3 observations -> 2*2*3*8 = 96
    rows = [("A", "s0", 0.0, 1.0), ("A", "s0", 1.0, 1.0), ("A", "s1", 2.0, 1.0),
            ("B", "s0", 0.0, 1.0)]
    ds = ingest_long(rows)
    assert memory_estimate(ds, "dense_min") == 96


def test_estimates_match_real_buffers_and_ordering():
    rng = np.random.default_rng(6)
    for _ in range(25):
        ds = make_random_dataset(rng)
        view = to_dense_min_ragged(ds)
        assert memory_estimate(ds, "dense_min") == view.values.nbytes
        n, d, t_count = ds.tensor.shape
        if n * d * t_count <= 10_000:
            assert memory_estimate(ds, "dense_full") == to_dense_full(ds).nbytes
        assert memory_estimate(ds, "dense_full") >= memory_estimate(ds, "dense_min")


def test_unknown_representation():
    ds = ingest_long([])
    with pytest.raises(ValueError):
        memory_estimate(ds, "csr")

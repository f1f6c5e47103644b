import numpy as np
import pytest

from helpers import make_random_dataset
from irts.ingest import export_long, ingest_long
from irts.taxonomy import (
    IrregularityProfile,
    SignalTimestamps,
    is_partially_observed,
    is_unevenly_sampled,
    profile,
    signal_pair_raggedness,
)


def dataset_from(signals: dict[str, list[float]], nan_at: tuple[str, float] | None = None):
    """One-instance dataset with the given signal timestamp vectors."""
    rows = []
    for sid, ts in signals.items():
        for t in ts:
            value = "NaN" if nan_at == (sid, t) else 1.0
            rows.append(("i", sid, t, value))
    return ingest_long(rows)


# -- single-signal detectors ------------------------------------------------------

def test_uneven_sampling():
    assert not is_unevenly_sampled([0, 1, 2, 3])
    assert is_unevenly_sampled([0, 1, 3])
    assert not is_unevenly_sampled([5])
    assert not is_unevenly_sampled([])
    assert not is_unevenly_sampled([1, 9])  # single interval


def test_uneven_sampling_tolerance():
    assert not is_unevenly_sampled([0.0, 1.0, 2.0 + 1e-12])
    assert is_unevenly_sampled([0.0, 1.0, 2.0 + 1e-12], rel_tol=1e-15)


def test_partially_observed():
    assert is_partially_observed(dataset_from({"a": [0, 1]}, nan_at=("a", 1)))
    assert not is_partially_observed(dataset_from({"a": [0, 1]}))
    assert not is_partially_observed(ingest_long([]))


def test_signal_timestamps_validation():
    with pytest.raises(ValueError):
        SignalTimestamps([2.0, 1.0])
    st = SignalTimestamps([1.0, 3.0, 4.0])
    np.testing.assert_array_equal(st.deltas, [2.0, 1.0])


# -- pairwise raggedness ------------------------------------------------------------

def test_pair_shift_example():
    # a = [t1, t2], b = [t2, t3] with even global spacing
    r = signal_pair_raggedness([0.0, 1.0], [1.0, 2.0])
    assert (r.ragged_length, r.shift, r.ragged_sampling) == (False, True, False)


def test_pair_ragged_length_example():
    r = signal_pair_raggedness([0.0, 1.0], [0.0, 1.0, 2.0])
    assert (r.ragged_length, r.shift, r.ragged_sampling) == (True, False, False)


def test_pair_ragged_sampling_example():
    r = signal_pair_raggedness([0.0, 1.0], [0.0, 2.0])
    assert (r.ragged_length, r.shift, r.ragged_sampling) == (False, False, True)


def test_pair_symmetry():
    rng = np.random.default_rng(10)
    for _ in range(200):
        a = np.sort(rng.choice(np.arange(12) * 0.5, size=rng.integers(0, 6),
                               replace=False))
        b = np.sort(rng.choice(np.arange(12) * 0.5, size=rng.integers(0, 6),
                               replace=False))
        assert signal_pair_raggedness(a, b) == signal_pair_raggedness(b, a)


def test_pair_empty_and_singleton():
    r = signal_pair_raggedness([], [0.0, 1.0])
    assert r.ragged_length and not r.shift and not r.ragged_sampling
    r = signal_pair_raggedness([0.5], [0.5])
    assert not r.any()


# -- the independence matrix -------------------------------------------------------

EVEN3 = [0.0, 1.0, 2.0]


def construction_us():
    return dataset_from({"a": [0.0, 1.0, 3.0], "b": [0.0, 1.0, 3.0]})


def construction_po():
    return dataset_from({"a": EVEN3, "b": EVEN3}, nan_at=("a", 1.0))


def construction_ul():
    return dataset_from({"a": [0.0, 1.0], "b": EVEN3})


def construction_sh():
    return dataset_from({"a": [0.0, 1.0], "b": [1.0, 2.0]})


def construction_rs():
    return dataset_from({"a": [0.0, 1.0], "b": [0.0, 2.0]})


INDEPENDENCE = [
    (construction_us, "unevenly_sampled"),
    (construction_po, "partially_observed"),
    (construction_ul, "ragged_length"),
    (construction_sh, "shift"),
    (construction_rs, "ragged_sampling"),
]


@pytest.mark.parametrize("build, intended", INDEPENDENCE)
def test_independence_matrix(build, intended):
    flags = profile(build()).as_dict()
    for name, value in flags.items():
        assert value == (name == intended), (
            f"{intended} construction set {name}={value}")


# -- dataset-level profile ----------------------------------------------------------

def test_profile_regular_grid_all_false():
    rows = [(i, s, float(t), 1.0) for i in "AB" for s in ("x", "y")
            for t in range(4)]
    flags = profile(ingest_long(rows))
    assert flags == IrregularityProfile(False, False, False, False, False)


def test_profile_interleaved_signals_ragged_sampling():
    # two signals, alternating timestamps: same length, both spread over the
    # same span, but positionally compared intervals differ
    ds = dataset_from({"a": [0.0, 1.0, 4.0], "b": [0.0, 3.0, 4.0]})
    assert profile(ds).ragged_sampling


def test_profile_cross_instance_length():
    rows = [("A", "s", 0.0, 1.0), ("A", "s", 1.0, 1.0),
            ("B", "s", 0.0, 1.0), ("B", "s", 1.0, 1.0), ("B", "s", 2.0, 1.0)]
    flags = profile(ingest_long(rows))
    assert flags.ragged_length and not flags.shift


def test_profile_cross_instance_shift():
    rows = [("A", "s", 0.0, 1.0), ("A", "s", 1.0, 1.0),
            ("B", "s", 1.0, 1.0), ("B", "s", 2.0, 1.0)]
    assert profile(ingest_long(rows)).shift


def test_profile_disjoint_instances_compare_by_rank_only():
    # same length, no shared timestamps: unrelated clocks, no raggedness
    rows = [("A", "s", 0.0, 1.0), ("A", "s", 1.0, 1.0), ("A", "s", 5.0, 1.0),
            ("B", "s", 0.25, 1.0), ("B", "s", 2.25, 1.0), ("B", "s", 2.75, 1.0)]
    flags = profile(ingest_long(rows))
    assert not flags.ragged_length and not flags.shift and not flags.ragged_sampling
    assert flags.unevenly_sampled
    # a length mismatch still registers across disjoint clocks
    rows.append(("B", "s", 3.0, 1.0))
    assert profile(ingest_long(rows)).ragged_length


def test_profile_empty_instance_triggers_length_only():
    from irts.ingest import LongRow

    ds = ingest_long([("A", "s", 0.0, 1.0), ("A", "s", 1.0, 1.0),
                      LongRow("B", "", None, None, None)])
    flags = profile(ds)
    assert flags.ragged_length and not flags.shift and not flags.ragged_sampling


def test_profile_survives_long_round_trip():
    rng = np.random.default_rng(11)
    for _ in range(15):
        ds = make_random_dataset(rng)
        again = ingest_long(list(export_long(ds)))
        assert profile(ds) == profile(again)


def test_profile_string_form():
    flags = IrregularityProfile(True, False, False, False, False)
    assert str(flags) == "US:true PO:false UL:false SH:false RS:false"

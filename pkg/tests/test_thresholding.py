import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from depthlayer.core import DepthMapError
from depthlayer.segmentation import segment_all_rows
from depthlayer.synthgen import gen_random_plateaus
from depthlayer.thresholding import difference_histogram, estimate_threshold

from conftest import depth_from_rows


def test_histogram_single_row():
    h = difference_histogram(depth_from_rows([[10, 10, 10, 50, 50]]), [0], "rows")
    assert h.counts == {0: 3, 40: 1}
    assert h.total == 4


def test_histogram_constant_map():
    h = difference_histogram(depth_from_rows(np.full((4, 4), 7)), range(4), "rows")
    assert h.counts == {0: 12}
    assert h.total == 12


def test_histogram_columns():
    h = difference_histogram(depth_from_rows([[1, 2], [3, 4]]), [0, 1], "columns")
    assert h.counts == {2: 2}
    assert h.total == 2


def test_histogram_errors():
    d = depth_from_rows([[1, 2, 3]])
    with pytest.raises(ValueError, match="empty"):
        difference_histogram(d, [], "rows")
    with pytest.raises(DepthMapError):
        difference_histogram(d, [0], "columns")  # height 1: columns have one pixel
    with pytest.raises(DepthMapError):
        difference_histogram(d, [1], "rows")


def _brute_histogram(rows):
    counts = {}
    for r in rows:
        for a, b in zip(r, r[1:]):
            counts[abs(a - b)] = counts.get(abs(a - b), 0) + 1
    return counts


@given(st.lists(st.lists(st.integers(0, 255), min_size=4, max_size=4), min_size=2, max_size=5))
def test_histogram_matches_pairwise_enumeration(rows):
    d = depth_from_rows(rows)
    h = difference_histogram(d, range(len(rows)), "rows")
    assert h.counts == _brute_histogram(rows)
    assert sum(h.counts.values()) == h.total
    hc = difference_histogram(d, range(4), "columns")
    assert hc.counts == _brute_histogram([list(c) for c in zip(*rows)])


def test_constant_map_clamps_to_one():
    est = estimate_threshold(depth_from_rows(np.full((5, 5), 42)), percentile=0.99)
    assert est.row_threshold == 1 and est.column_threshold == 1
    est = estimate_threshold(depth_from_rows(np.full((5, 5), 42)), method="paper-mode")
    assert est.row_threshold == 1


def test_ramp_noise_row_with_one_step():
    # 99 pairs: 98 ramp steps of 0 or 1, one 40 step between columns 49 and 50
    steps = [1 if i % 3 == 0 else 0 for i in range(98)]
    steps.insert(49, 40)
    row = np.concatenate(([100], 100 + np.cumsum(steps)))
    assert row.size == 100
    diffs = np.abs(np.diff(row))
    assert sorted(set(diffs.tolist())) == [0, 1, 40]
    assert (diffs == 40).sum() == 1
    d = depth_from_rows([row])
    est = estimate_threshold(d, percentile=0.99)
    assert est.row_threshold == 1
    segs = segment_all_rows(d, est.row_threshold).rows[0]
    assert [s.start for s in segs] == [0, 50]


def test_two_plateaus_4x5():
    d = depth_from_rows([[10, 10, 60, 60, 60]] * 4)
    est = estimate_threshold(d)
    assert 1 <= est.row_threshold <= 49
    segs = segment_all_rows(d, est.row_threshold)
    assert all(len(r) == 2 for r in segs.rows)


def test_estimate_errors():
    d = depth_from_rows([[1, 2], [3, 4]])
    with pytest.raises(ValueError):
        estimate_threshold(d, sample_count=0)
    with pytest.raises(ValueError):
        estimate_threshold(d, method="otsu")
    with pytest.raises(ValueError):
        estimate_threshold(d, percentile=0)
    with pytest.raises(DepthMapError):
        estimate_threshold(depth_from_rows([[5]]))


def test_single_row_borrows_row_estimate_for_columns():
    est = estimate_threshold(depth_from_rows([[0, 0, 0, 0, 90]]))
    assert est.row_threshold == est.column_threshold == 1


def test_paper_mode_takes_max_of_line_peaks():
    # line peaks: row0 -> 0, row1 -> 3 (two 3-steps out of three pairs)
    d = depth_from_rows([[5, 5, 5, 5], [0, 3, 6, 6]])
    est = estimate_threshold(d, method="paper-mode")
    assert est.row_threshold == 3


def test_estimation_is_deterministic():
    d = gen_random_plateaus(3, size=128, jitter=2).depth
    a = estimate_threshold(d, sample_count=10, seed=5)
    b = estimate_threshold(d, sample_count=10, seed=5)
    assert a == b


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(10, 40))
def test_plateau_thresholds_fall_below_step(seed, step):
    d = gen_random_plateaus(seed, size=64, min_step=step).depth
    est = estimate_threshold(d, seed=seed)
    assert 1 <= est.row_threshold < step
    assert 1 <= est.column_threshold < step


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.05, 1.0), st.floats(0.05, 1.0))
def test_percentile_is_monotone(seed, p1, p2):
    p1, p2 = sorted((p1, p2))
    d = gen_random_plateaus(seed, size=32, jitter=3).depth
    a = estimate_threshold(d, percentile=p1, seed=seed)
    b = estimate_threshold(d, percentile=p2, seed=seed)
    assert a.row_threshold <= b.row_threshold
    assert a.column_threshold <= b.column_threshold


@given(st.lists(st.integers(0, 50), min_size=2, max_size=40), st.floats(0.01, 1.0))
def test_percentile_matches_numpy_lower_quantile(row, p):
    d = depth_from_rows([row])
    h = difference_histogram(d, [0], "rows")
    diffs = np.abs(np.diff(row))
    assert h.percentile(p) == int(np.quantile(diffs, p, method="lower"))

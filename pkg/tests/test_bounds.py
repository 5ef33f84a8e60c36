"""Counting envelope oracles.

The closed forms were derived independently by summing the per-step bound
series by hand (sum of 6k-4 is 3k^2-k, of 22k-16 is 11k^2-5k, of 16k-12 is
8k^2-4k) and the spot values below were then frozen.
"""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gemdual import bounds
from gemdual.engine import run_script
from gemdual.gem import bloboid
from gemdual.scripts import greedy_max_rank


def test_initial_counts_frozen():
    assert bounds.initial_counts(1) == (7, 15, 10)
    assert bounds.initial_counts(3) == (11, 35, 30)
    assert bounds.initial_counts(20) == (45, 205, 200)
    with pytest.raises(ValueError):
        bounds.initial_counts(0)


def test_step_bounds_frozen():
    assert bounds.step_increment_bound(1) == (2, 6, 4)
    assert bounds.step_increment_bound(2) == (8, 28, 20)
    assert bounds.step_increment_bound(3) == (14, 50, 36)
    with pytest.raises(ValueError):
        bounds.step_increment_bound(0)


def test_total_bound_frozen():
    assert bounds.total_bound(1) == (7, 15, 10)
    assert bounds.total_bound(3) == (21, 69, 54)
    assert bounds.total_bound(200) == (119009, 436621, 318012)


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=500))
def test_cumulative_is_the_series_sum(k):
    acc = (0, 0, 0)
    for i in range(1, k + 1):
        acc = tuple(a + b for a, b in zip(acc, bounds.step_increment_bound(i)))
    assert bounds.cumulative_increment_bound(k) == acc


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=1, max_value=10**4))
def test_totals_close_the_telescope(n):
    got = tuple(
        a + b
        for a, b in zip(bounds.initial_counts(n), bounds.cumulative_increment_bound(n - 1))
    )
    assert got == bounds.total_bound(n)


def test_audit_accepts_a_real_run():
    n = 5
    eng, _ = run_script(bloboid(n), greedy_max_rank(n))
    report = bounds.audit(bounds.initial_counts(n), [r.delta for r in eng.reports])
    assert report["ok"]
    assert report["final"] == list(eng.cx.census())
    assert all(row["within"] for row in report["steps"])
    assert all(s >= 0 for s in report["final_slack"])


def test_audit_flags_an_oversized_step():
    report = bounds.audit((7, 15, 10), [(2, 6, 4), (9, 28, 20)])
    assert not report["ok"]
    assert report["steps"][0]["within"]
    assert not report["steps"][1]["within"]
    assert report["steps"][1]["slack"][0] == -1


def test_audit_flags_a_final_overflow():
    # per-step fine but the running total tops the cumulative envelope
    report = bounds.audit((100, 0, 0), [(2, 6, 4)])
    assert report["final_bound"] == [102, 6, 4]
    assert report["ok"]
    report = bounds.audit((100, 0, 0), [(3, 6, 4)])
    assert not report["ok"]

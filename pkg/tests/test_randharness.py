import math

import pytest

from realhom.randharness import empirical_tail, theoretical_tail_bound


def test_bound_examples():
    assert theoretical_tail_bound(1, 1, 2, 3, 1000) == pytest.approx(96 * math.e / 1000)
    assert theoretical_tail_bound(1, 1, 2, 3, 1000) == pytest.approx(0.2609, abs=1e-4)
    assert theoretical_tail_bound(1, 1, 2, 3, 1e12) < 1e-6
    assert theoretical_tail_bound(1, 1, 2, 3, 96 * math.e * 0.99) == 1.0
    with pytest.raises(ValueError):
        theoretical_tail_bound(1, 1, 2, 3, 0)


def test_no_samples():
    with pytest.raises(ValueError, match="no samples"):
        empirical_tail(1, 1, (2,), 0, [500])


def test_report_contract():
    rep = empirical_tail(1, 1, (2,), 300, [2, 5, 1000, 50], seed=3)
    assert rep.thresholds == [2.0, 5.0, 50.0, 1000.0]
    assert all(0 <= e <= 1 for e in rep.empirical)
    assert all(a >= b for a, b in zip(rep.empirical, rep.empirical[1:]))
    assert all(e <= b for e, b in zip(rep.empirical, rep.bound))
    assert rep.samples == 300 and rep.seed == 3
    assert math.isfinite(rep.mean_log2)


def test_deterministic_and_worker_independent():
    a = empirical_tail(1, 1, (2,), 200, [1.5, 3, 10], seed=11)
    b = empirical_tail(1, 1, (2,), 200, [1.5, 3, 10], seed=11, workers=3)
    assert a.to_csv() == b.to_csv() and a.estimates == b.estimates
    c = empirical_tail(1, 1, (2,), 200, [1.5, 3, 10], seed=12)
    assert c.estimates != a.estimates


def test_csv_columns():
    rep = empirical_tail(1, 1, (2,), 20, [500, 1000], seed=0)
    lines = rep.to_csv().splitlines()
    assert lines[0] == "t,empirical,bound,samples,seed"
    assert len(lines) == 3 and lines[1].endswith(",20,0")


def test_higher_dimension_runs():
    rep = empirical_tail(2, 1, (2,), 10, [10, 100], k=4, seed=1)
    assert all(e <= b for e, b in zip(rep.empirical, rep.bound))

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lipoplus.domain import (BoxDomain, History, RngStream, RunTrace, as_point,
                             euclidean_distance, sample_uniform)

coords = st.lists(st.floats(-1e3, 1e3), min_size=3, max_size=3)


def test_sample_stays_in_unit_square():
    dom = BoxDomain.cube(0, 1, 2)
    x = sample_uniform(dom, RngStream(123))
    assert x.shape == (2,)
    assert dom.contains(x)


def test_uniform_mean_within_clt_bound():
    dom = BoxDomain.cube(-5, 5, 2)
    rng = RngStream(7)
    n = 100_000
    pts = dom.scale(rng.peek_unit(n, 2))
    width = 10.0
    tol = 5 * width / math.sqrt(12 * n)
    assert np.all(np.abs(pts.mean(axis=0)) < tol)


def test_million_draws_inside_box():
    dom = BoxDomain(np.array([-2.0, 3.0, 0.0]), np.array([1.0, 3.5, 1e-3]))
    pts = dom.scale(RngStream(1).peek_unit(1_000_000, 3))
    assert np.all(pts >= dom.lower) and np.all(pts <= dom.upper)


@pytest.mark.parametrize("lower,upper", [([0.0, 1.0], [0.0, 2.0]), ([1.0], [0.5]), ([0.0], [0.0, 1.0])])
def test_degenerate_box_rejected(lower, upper):
    with pytest.raises(ValueError):
        BoxDomain(np.array(lower), np.array(upper))


def test_volume():
    assert BoxDomain.cube(-1, 1, 10).volume() == 2.0 ** 10
    assert BoxDomain(np.array([0.0, 0.0]), np.array([2.0, 3.0])).volume() == 6.0


def test_non_finite_point_rejected():
    with pytest.raises(ValueError):
        as_point([0.0, np.nan])


@pytest.mark.parametrize("a,b,expected", [
    ((0, 0), (3, 4), 5.0),
    ((1.5, -2), (1.5, -2), 0.0),
    ((1, 1, 1), (0, 0, 0), 1.7320508075688772),
])
def test_distance_examples(a, b, expected):
    assert euclidean_distance(a, b) == pytest.approx(expected, abs=1e-12)


def test_distance_dimension_mismatch():
    with pytest.raises(ValueError):
        euclidean_distance((0, 0), (0, 0, 0))


@given(coords, coords, coords)
def test_triangle_inequality(a, b, c):
    ab = euclidean_distance(a, b)
    assert ab <= euclidean_distance(a, c) + euclidean_distance(c, b) + 1e-9 * (1 + ab)
    assert ab == euclidean_distance(b, a)


def test_stream_is_independent_of_block_sizes():
    a, b = RngStream(99), RngStream(99)
    whole = a.peek_unit(10_000, 3).copy()
    got = []
    sizes = [1, 7, 4095, 4097, 1800]
    for n in sizes:
        got.append(b.peek_unit(n, 3).copy())
        b.consume(n)
    assert np.array_equal(np.concatenate(got), whole)


def test_same_seed_same_draws_and_coins():
    a, b = RngStream(5), RngStream(5)
    assert np.array_equal(a.peek_unit(50, 2), b.peek_unit(50, 2))
    assert [a.bernoulli(0.3) for _ in range(100)] == [b.bernoulli(0.3) for _ in range(100)]
    assert not np.array_equal(RngStream(6).peek_unit(50, 2), a.peek_unit(50, 2))


def test_history_running_extremes_match_scan():
    rng = np.random.default_rng(0)
    h = History(2, capacity=1)
    for v in rng.normal(size=300):
        h.append(rng.random(2), v)
        assert h.running_max == h.values.max()
        assert h.running_min == h.values.min()
    assert np.all(np.diff(h.values[h.order_by_value]) >= 0)
    assert h.best().value == h.values.max()


def test_history_rejects_nan_value():
    with pytest.raises(ValueError):
        History(1).append([0.0], float("nan"))


def test_trace_csv_roundtrip_keeps_full_precision():
    tr = RunTrace()
    for s, v in [(1, -1 / 3), (4, 0.1), (9, math.pi)]:
        tr.append(s, v)
    text = tr.to_csv()
    assert text.splitlines()[0] == "eval_index,cumulative_samples,best_value"
    assert text.splitlines()[1] == "1,1,-0.33333333333333331"
    back = RunTrace.from_csv(text)
    assert back == tr
    back.check()


def test_trace_check_catches_decreasing_best():
    tr = RunTrace()
    tr.append(1, 1.0)
    tr.append(2, 0.5)
    with pytest.raises(AssertionError):
        tr.check()


@settings(max_examples=50)
@given(st.lists(st.tuples(st.integers(1, 50), st.floats(0, 1)), min_size=1, max_size=30))
def test_trace_invariants_hold_for_monotone_input(steps):
    tr = RunTrace()
    total, best = 0, -np.inf
    for inc, v in steps:
        total += inc
        best = max(best, v)
        tr.append(total, best)
    tr.check()

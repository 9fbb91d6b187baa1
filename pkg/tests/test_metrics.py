from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dzp.metrics import bottleneck_by_dim, bottleneck_distance, bottleneck_points
from dzp.zigzag import Interval, PersistenceDiagram
from oracles import brute_bottleneck


def dgm(*pairs, dim=0):
    return PersistenceDiagram(tuple(Interval(dim, 2 * b, 2 * d, False) for b, d in pairs))


def test_identical_is_zero():
    a = dgm((1, 3), (2, 2.5))
    assert bottleneck_distance(a, a, 0) == 0.0


def test_point_versus_empty():
    assert bottleneck_distance(dgm((1, 3)), dgm(), 0) == 1.0
    assert brute_bottleneck([(1, 3)], []) == 1.0


def test_point_versus_point():
    assert bottleneck_distance(dgm((1, 3)), dgm((1, 4)), 0) == 1.0
    assert brute_bottleneck([(1, 3)], [(1, 4)]) == 1.0


def test_dimensions_never_mix():
    a = dgm((1, 3), dim=0)
    b = dgm((1, 3), dim=1)
    assert bottleneck_by_dim(a, b, [0, 1]) == {0: 1.0, 1: 1.0}
    assert bottleneck_distance(a, b) == 1.0
    assert bottleneck_distance(PersistenceDiagram(()), PersistenceDiagram(())) == 0.0


def test_open_bars_use_recorded_death():
    a = PersistenceDiagram((Interval(0, 2, 12, True),))
    b = PersistenceDiagram((Interval(0, 2, 8, False),))
    assert bottleneck_distance(a, b, 0) == 2.0


def rand_points(rng, k):
    out = []
    for _ in range(k):
        b = rng.randint(0, 12) / 2
        out.append((b, b + rng.randint(0, 8) / 2))
    return out


@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 10**6))
def test_matches_brute_force(m, n, seed):
    rng = random.Random(seed)
    a, b = rand_points(rng, m), rand_points(rng, n)
    assert abs(bottleneck_points(a, b) - brute_bottleneck(a, b)) <= 1e-9


@given(st.integers(0, 6), st.integers(0, 6), st.integers(0, 10**6))
def test_matches_brute_force_real_coordinates(m, n, seed):
    rng = random.Random(seed)

    def pts(k):
        return [(x, x + rng.expovariate(1.0)) for x in (rng.uniform(0, 5) for _ in range(k))]

    a, b = pts(m), pts(n)
    assert abs(bottleneck_points(a, b) - brute_bottleneck(a, b)) <= 1e-9


@given(st.integers(0, 8), st.integers(0, 8), st.integers(0, 8), st.integers(0, 10**6))
def test_metric_axioms(i, j, k, seed):
    rng = random.Random(seed)
    a, b, c = rand_points(rng, i), rand_points(rng, j), rand_points(rng, k)
    assert bottleneck_points(a, a) == 0.0
    assert bottleneck_points(a, b) == bottleneck_points(b, a)
    assert bottleneck_points(a, c) <= bottleneck_points(a, b) + bottleneck_points(b, c) + 1e-9

from __future__ import annotations

import random
from itertools import combinations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from dzp.complexes import SimplicialComplex, build_vietoris_rips
from dzp.errors import ConsistencyError, ValidationError
from dzp.temporal import Snapshot, WindowSequence
from dzp.zigzag import (
    Interval,
    PersistenceDiagram,
    ZigzagFiltration,
    assemble_zigzag,
    betti_numbers,
    compute_zigzag_diagram,
    gf2_rank,
)
from oracles import betti, monotone_zigzag_bars, random_window

EDGE = [(0, 1)]
TWO_POINTS = [(0,), (1,)]
HOLLOW = [(0, 1), (1, 2), (0, 2)]
FILLED = [(0, 1, 2)]


def diagram(*seq, max_hom_dim=1):
    return compute_zigzag_diagram(ZigzagFiltration.from_sequence(seq, max_dim=2), max_hom_dim)


# -- worked examples ---------------------------------------------------------------------


def test_constant_edge():
    d = diagram(EDGE, EDGE, EDGE)
    assert d.intervals == (Interval(0, 2, 4, True),)
    assert (d.intervals[0].birth, d.intervals[0].death) == (1.0, 2.0)


def test_components_merge_in_union():
    d = diagram(TWO_POINTS, EDGE, EDGE)
    assert d.intervals == (Interval(0, 2, 3, False), Interval(0, 2, 4, True))
    short = d.intervals[0]
    assert (short.birth, short.death) == (1.0, 1.5)


def test_cycle_filled_in_union():
    d = diagram(HOLLOW, FILLED, FILLED)
    assert d.of_dim(0) == [Interval(0, 2, 4, True)]
    assert d.of_dim(1) == [Interval(1, 2, 3, False)]
    assert (d.of_dim(1)[0].birth, d.of_dim(1)[0].death) == (1.0, 1.5)


def test_cycle_living_only_in_union():
    # born entering the union, dies leaving it: first dead position is snapshot 2
    d = diagram([(0, 1), (1, 2)], HOLLOW, [(0, 1), (0, 2)])
    assert d.of_dim(1) == [Interval(1, 3, 4, False)]
    assert d.of_dim(1)[0].birth == 1.5


def test_component_dying_at_last_snapshot():
    # vertex 0 is gone from the final complex; its first dead position is 3
    d = diagram([(0,)], [(0,), (1,)], [(0,), (1,)], [(0,), (1,)], [(1,)])
    assert d.of_dim(0) == [Interval(0, 2, 6, False), Interval(0, 3, 6, True)]
    assert not d.of_dim(0)[0].covers(6) and d.of_dim(0)[1].covers(6)


def test_length_and_arrows():
    snaps = [Snapshot.from_edges(t, EDGE) for t in (1, 2, 3)]
    f = assemble_zigzag(WindowSequence(tuple(snaps)))
    assert len(f) == 5 and f.length == 3
    assert f.positions_x2 == [2, 3, 4, 5, 6]
    assert f.arrows == ("forward", "backward", "forward", "backward")
    (only,) = assemble_zigzag([snaps[0]]).complexes
    assert assemble_zigzag([snaps[0]]).arrows == ()
    assert only.label == 2


def test_identical_snapshots_union_is_idempotent():
    s = Snapshot.from_edges(1, [(0, 1), (1, 2), (2, 3)])
    s2 = Snapshot(2, s.nodes, s.edges)
    for backend in ("dowker", "vr"):
        c1, u, c2 = assemble_zigzag([s, s2], backend).complexes
        assert c1.simplices == u.simplices == c2.simplices


def test_union_witnesses_keep_inclusions():
    # landmarks {a} then {b}; the union keeps both snapshots' witnesses
    g1 = Snapshot.from_edges(1, [(0, 1)])
    g2 = Snapshot.from_edges(2, [(1, 2)])
    f = assemble_zigzag([g1, g2], "dowker")
    assert [p.landmarks for p in f.partitions] == [{0}, {1}]
    assert all(f.complexes[s] <= f.complexes[t] for s, t in f.arrow_pairs())


def test_subcomplex_violation_names_position():
    with pytest.raises(ConsistencyError, match=r"position 2 -> 2\.5"):
        ZigzagFiltration.from_sequence([EDGE, EDGE, EDGE, [(0,)], EDGE])


def test_even_length_rejected():
    with pytest.raises(ValidationError):
        ZigzagFiltration.from_sequence([EDGE, EDGE])


def test_max_hom_dim_precondition():
    f = ZigzagFiltration.from_sequence([EDGE], max_dim=1)
    with pytest.raises(ValidationError):
        compute_zigzag_diagram(f, 1)
    assert compute_zigzag_diagram(f, 0).intervals == (Interval(0, 2, 2, True),)


def test_unknown_backend():
    with pytest.raises(ValidationError):
        assemble_zigzag([Snapshot.from_edges(1, EDGE)], "cech")


# -- betti oracle ----------------------------------------------------------------------------


@pytest.mark.parametrize(
    "maximal, expected",
    [(HOLLOW, [1, 1]), (FILLED, [1, 0]), ([(0, 1), (2, 3)], [2, 0]), ([], [0, 0])],
)
def test_betti_examples(maximal, expected):
    c = SimplicialComplex.from_maximal(maximal)
    assert betti_numbers(c, 1) == expected
    assert betti(c.simplices) == expected


def test_gf2_rank():
    assert gf2_rank([[1, 1], [1, 1]]) == 1
    assert gf2_rank([[1, 0, 1], [0, 1, 1], [1, 1, 0]]) == 2
    assert gf2_rank([[2, 0], [0, 3]]) == 1


@given(st.integers(0, 10**6))
def test_betti_numbers_agree_between_oracles(seed):
    rng = random.Random(seed)
    maximal = [rng.sample(range(8), rng.randint(1, 3)) for _ in range(rng.randint(0, 10))]
    c = SimplicialComplex.from_maximal(maximal)
    assert betti_numbers(c, 1) == betti(c.simplices, 1)


def assert_betti_consistent(f: ZigzagFiltration, d: PersistenceDiagram, max_hom_dim: int = 1):
    for c in f.complexes:
        b = betti_numbers(c, max_hom_dim)
        for k in range(max_hom_dim + 1):
            assert d.count_covering(c.label, k) == b[k], (c.label, k)


@given(st.integers(1, 5), st.integers(1, 10), st.floats(0.1, 0.6), st.sampled_from(["dowker", "vr"]), st.integers(0, 10**6))
def test_betti_consistency(w, n, p, backend, seed):
    snaps = random_window(random.Random(seed), w, n, p)
    f = assemble_zigzag(snaps, backend)
    d = compute_zigzag_diagram(f)
    assert_betti_consistent(f, d)
    for iv in d:
        assert iv.birth_x2 <= iv.death_x2
        assert iv.death_x2 <= 2 * w
        if iv.open:
            assert iv.death_x2 == 2 * w
    if any(len(c) for c in f.complexes):
        assert d.of_dim(0)


@given(st.integers(1, 5), st.integers(0, 10**6))
def test_constant_module(w, seed):
    rng = random.Random(seed)
    maximal = [rng.sample(range(7), rng.randint(1, 3)) for _ in range(rng.randint(1, 8))]
    c = SimplicialComplex.from_maximal(maximal)
    d = compute_zigzag_diagram(ZigzagFiltration((c,) * (2 * w - 1), 2))
    b = betti_numbers(c, 1)
    expected = sorted([Interval(k, 2, 2 * w, True) for k in range(2) for _ in range(b[k])])
    assert list(d.intervals) == expected


@given(st.integers(1, 5), st.integers(0, 10**6))
def test_monotone_sequences_match_standard_persistence(w, seed):
    rng = random.Random(seed)
    pool = [tuple(sorted(rng.sample(range(8), rng.randint(1, 3)))) for _ in range(14)]
    cut = sorted(rng.randint(0, len(pool)) for _ in range(w))
    seq = [SimplicialComplex.from_maximal(pool[: c or 1]) for c in cut]
    complexes = []
    for i, c in enumerate(seq):
        complexes.append(c)
        if i + 1 < len(seq):
            complexes.append(seq[i + 1])
    d = compute_zigzag_diagram(ZigzagFiltration(tuple(complexes), 2))
    assert list(d.intervals) == monotone_zigzag_bars(seq)


@given(st.integers(2, 5), st.integers(3, 9), st.integers(0, 10**6))
def test_growing_graph_vr_matches_standard_persistence(w, n, seed):
    rng = random.Random(seed)
    edges: set = set()
    snaps = []
    pairs = list(combinations(range(n), 2))
    for t in range(1, w + 1):
        edges |= {e for e in pairs if rng.random() < 0.15}
        snaps.append(Snapshot.from_edges(t, edges, range(n)))
    f = assemble_zigzag(snaps, "vr", delta=1)
    d = compute_zigzag_diagram(f)
    seq = [build_vietoris_rips(s, 1) for s in snaps]
    assert list(d.intervals) == monotone_zigzag_bars(seq)


def test_diagram_helpers():
    d = PersistenceDiagram((Interval(1, 3, 6, False), Interval(0, 2, 6, True)))
    assert d.intervals[0].dim == 0
    assert d.points(1) == [(1.5, 3.0)]
    assert d.dims == [0, 1]
    assert d.intervals[1].persistence == 1.5
    assert d.count_covering(6, 0) == 1 and d.count_covering(6, 1) == 0
    with pytest.raises(ValidationError):
        PersistenceDiagram((Interval(0, 5, 4, False),))

"""Zigzag filtrations of complexes and their GF(2) interval decomposition.

Intervals are recovered from the generalized rank invariant: for every
sub-interval ``[i, j]`` of positions we compute the rank of the canonical map
from the limit to the colimit of the homology zigzag restricted to ``[i, j]``.
That rank counts the bars containing ``[i, j]``; inclusion-exclusion over the
neighbouring intervals then yields the multiplicity of each bar.

Homology vectors are GF(2) chains packed into Python ints, one bit per
simplex.

Positions are stored doubled so half-integers stay exact: snapshot ``t`` sits
at ``2t`` and the union of ``t`` and ``t + 1`` at ``2t + 1``.
"""
from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from itertools import combinations
from typing import NamedTuple

import numpy as np

from .complexes import SimplicialComplex, build_vietoris_rips, dowker_complex
from .errors import ConsistencyError, ValidationError
from .landmarks import LandmarkPartition, seeded_epsilon_nets
from .temporal import Snapshot, WindowSequence, union_graph

FORWARD = "forward"
BACKWARD = "backward"


def x2_to_time(x2: int) -> float:
    return x2 / 2


def _fmt_x2(x2: int) -> str:
    return str(x2 // 2) if x2 % 2 == 0 else f"{x2 // 2}.5"


class Interval(NamedTuple):
    """A bar ``[birth, death)``; ``open`` bars are alive at the last complex and
    carry ``death`` equal to that complex's position (inclusive)."""

    dim: int
    birth_x2: int
    death_x2: int
    open: bool = False

    @property
    def birth(self) -> float:
        return self.birth_x2 / 2

    @property
    def death(self) -> float:
        return self.death_x2 / 2

    @property
    def persistence(self) -> float:
        return (self.death_x2 - self.birth_x2) / 2

    def covers(self, x2: int) -> bool:
        if self.open:
            return self.birth_x2 <= x2 <= self.death_x2
        return self.birth_x2 <= x2 < self.death_x2


@dataclass(frozen=True)
class PersistenceDiagram:
    intervals: tuple[Interval, ...]

    def __post_init__(self):
        ivs = tuple(sorted(Interval(*iv) for iv in self.intervals))
        for iv in ivs:
            if iv.birth_x2 > iv.death_x2 or iv.dim < 0:
                raise ValidationError(f"malformed interval {iv}")
        object.__setattr__(self, "intervals", ivs)

    def of_dim(self, dim: int) -> list[Interval]:
        return [iv for iv in self.intervals if iv.dim == dim]

    def points(self, dim: int) -> list[tuple[float, float]]:
        return [(iv.birth, iv.death) for iv in self.of_dim(dim)]

    @property
    def dims(self) -> list[int]:
        return sorted({iv.dim for iv in self.intervals})

    def count_covering(self, x2: int, dim: int) -> int:
        return sum(1 for iv in self.intervals if iv.dim == dim and iv.covers(x2))

    def __len__(self) -> int:
        return len(self.intervals)

    def __iter__(self):
        return iter(self.intervals)


@dataclass(frozen=True)
class ZigzagFiltration:
    """``C_1 -> U_1 <- C_2 -> U_2 <- ... C_w`` with arrows alternating, forward first.

    ``max_dim`` is the skeleton the complexes were truncated to, if known.
    """

    complexes: tuple[SimplicialComplex, ...]
    max_dim: int | None = None
    partitions: tuple[LandmarkPartition, ...] | None = None

    def __post_init__(self):
        cs = tuple(self.complexes)
        if len(cs) % 2 == 0:
            raise ValidationError(f"zigzag needs an odd number of complexes, got {len(cs)}")
        cs = tuple(c.with_label(a + 2) for a, c in enumerate(cs))
        object.__setattr__(self, "complexes", cs)
        if self.partitions is not None:
            object.__setattr__(self, "partitions", tuple(self.partitions))
        for a, (src, dst) in enumerate(self.arrow_pairs()):
            if not cs[src] <= cs[dst]:
                extra = sorted(cs[src].simplices - cs[dst].simplices)[:3]
                raise ConsistencyError(
                    f"subcomplex violation at position {_fmt_x2(cs[src].label)} -> "
                    f"{_fmt_x2(cs[dst].label)}: {extra} missing from the target"
                )

    @classmethod
    def from_sequence(cls, complexes: Iterable[SimplicialComplex | Iterable[Iterable[int]]], max_dim=None):
        """Accept complexes or plain lists of maximal simplices."""
        cs = [c if isinstance(c, SimplicialComplex) else SimplicialComplex.from_maximal(c) for c in complexes]
        return cls(tuple(cs), max_dim)

    @property
    def arrows(self) -> tuple[str, ...]:
        return tuple(FORWARD if a % 2 == 0 else BACKWARD for a in range(len(self.complexes) - 1))

    def arrow_pairs(self) -> list[tuple[int, int]]:
        """(source, target) position indices of each inclusion."""
        return [(a, a + 1) if d == FORWARD else (a + 1, a) for a, d in enumerate(self.arrows)]

    @property
    def positions_x2(self) -> list[int]:
        return [c.label for c in self.complexes]

    @property
    def length(self) -> int:
        """Number of snapshots ``w``."""
        return (len(self.complexes) + 1) // 2

    def __len__(self) -> int:
        return len(self.complexes)


def assemble_zigzag(
    window: WindowSequence | Sequence[Snapshot],
    backend: str = "dowker",
    eps: int = 1,
    delta: int = 1,
    max_dim: int = 2,
) -> ZigzagFiltration:
    """Snapshot complexes at integer positions, union complexes in between.

    For the Dowker backend a union uses the union of both landmark sets and
    the union of both witness sets; that keeps each snapshot complex a
    subcomplex of its neighbouring unions.
    """
    snaps = list(window)
    if not snaps:
        raise ValidationError("empty window")
    if backend == "dowker":
        parts = seeded_epsilon_nets(snaps, eps)
        complexes = []
        for a, s in enumerate(snaps):
            complexes.append(dowker_complex(s, parts[a].landmarks, parts[a].witnesses, delta, max_dim))
            if a + 1 < len(snaps):
                nxt = parts[a + 1]
                complexes.append(
                    dowker_complex(
                        union_graph(s, snaps[a + 1]),
                        parts[a].landmarks | nxt.landmarks,
                        parts[a].witnesses | nxt.witnesses,
                        delta,
                        max_dim,
                    )
                )
        return ZigzagFiltration(tuple(complexes), max_dim, tuple(parts))
    if backend == "vr":
        complexes = []
        for a, s in enumerate(snaps):
            complexes.append(build_vietoris_rips(s, delta, max_dim))
            if a + 1 < len(snaps):
                complexes.append(build_vietoris_rips(union_graph(s, snaps[a + 1]), delta, max_dim))
        return ZigzagFiltration(tuple(complexes), max_dim)
    raise ValidationError(f"unknown backend {backend!r}; expected 'dowker' or 'vr'")


# ---------------------------------------------------------------------------
# GF(2) linear algebra on int bitsets


def _top(v: int) -> int:
    return v.bit_length() - 1


class _Reducer:
    """Echelon basis keyed by leading bit, each vector carrying a tag bitset."""

    __slots__ = ("pivots",)

    def __init__(self):
        self.pivots: dict[int, tuple[int, int]] = {}

    def reduce(self, v: int, tag: int = 0) -> tuple[int, int]:
        piv = self.pivots
        while v:
            p = _top(v)
            hit = piv.get(p)
            if hit is None:
                break
            v ^= hit[0]
            tag ^= hit[1]
        return v, tag

    def add(self, v: int, tag: int = 0) -> bool:
        v, tag = self.reduce(v, tag)
        if v:
            self.pivots[_top(v)] = (v, tag)
            return True
        return False


def _rank(vectors: Iterable[int]) -> int:
    red = _Reducer()
    return sum(red.add(v) for v in vectors)


def _kernel(columns: Sequence[int]) -> list[int]:
    """Basis of ``{x : sum_j x_j columns[j] = 0}`` as bitsets over column indices."""
    red = _Reducer()
    out = []
    for j, col in enumerate(columns):
        rem, tag = red.reduce(col, 1 << j)
        if rem:
            red.pivots[_top(rem)] = (rem, tag)
        else:
            out.append(tag)
    return out


class _Homology:
    """H_k of one complex: representative cycles plus a coordinate map."""

    def __init__(self, cx: SimplicialComplex, k: int, index: dict[int, dict[tuple, int]]):
        kidx = index[k]
        faces = index.get(k - 1, {})
        ksimp = [s for s in cx.simplices if len(s) == k + 1]
        cols = []
        for s in ksimp:
            bd = 0
            if k > 0:
                for f in combinations(s, k):
                    bd ^= 1 << faces[f]
            cols.append(bd)
        cycles = [
            _combine(tag, ksimp, kidx) for tag in _kernel(cols)
        ]
        self.reducer = _Reducer()
        for s in cx.simplices:
            if len(s) == k + 2:
                bd = 0
                for f in combinations(s, k + 1):
                    bd ^= 1 << kidx[f]
                self.reducer.add(bd)
        self.reps: list[int] = []
        for z in cycles:
            h = len(self.reps)
            if self.reducer.add(z, 1 << h):
                self.reps.append(z)

    @property
    def dim(self) -> int:
        return len(self.reps)

    def coords(self, z: int) -> int:
        rem, tag = self.reducer.reduce(z)
        if rem:
            raise ConsistencyError("chain is not a cycle of the target complex")
        return tag


def _combine(tag: int, simplices: list[tuple], kidx: dict[tuple, int]) -> int:
    z = 0
    j = 0
    while tag:
        if tag & 1:
            z ^= 1 << kidx[simplices[j]]
        tag >>= 1
        j += 1
    return z


def _homology_zigzag(f: ZigzagFiltration, k: int):
    all_simplices = set().union(*(c.simplices for c in f.complexes))
    index = {}
    for d in (k - 1, k, k + 1):
        if d >= 0:
            ordered = sorted(s for s in all_simplices if len(s) == d + 1)
            index[d] = {s: i for i, s in enumerate(ordered)}
    spaces = [_Homology(c, k, index) for c in f.complexes]
    maps = []
    for src, dst in f.arrow_pairs():
        maps.append((src, dst, [spaces[dst].coords(z) for z in spaces[src].reps]))
    return [h.dim for h in spaces], maps


def _generalized_rank(dims: list[int], maps, i: int, j: int) -> int:
    """Rank of lim -> colim for the homology zigzag restricted to positions i..j."""
    off = {}
    total = 0
    for a in range(i, j + 1):
        off[a] = total
        total += dims[a]
    if dims[i] == 0:
        return 0
    inner = [m for m in maps[i:j]]

    # limit: kernel of the consistency constraints, one block per arrow
    coff = []
    ctotal = 0
    for src, dst, _ in inner:
        coff.append(ctotal)
        ctotal += dims[dst]
    phi = [0] * total
    for c, (src, dst, cols) in enumerate(inner):
        base = coff[c]
        for h, col in enumerate(cols):
            phi[off[src] + h] ^= col << base
        for h in range(dims[dst]):
            phi[off[dst] + h] ^= 1 << (base + h)
    lim = _kernel(phi)

    # colimit relations: e ~ M e across every arrow
    rel = []
    for src, dst, cols in inner:
        for h, col in enumerate(cols):
            rel.append((1 << (off[src] + h)) ^ (col << off[dst]))
    mask_i = ((1 << dims[i]) - 1) << off[i]
    images = [x & mask_i for x in lim]
    return _rank(rel + images) - _rank(rel)


def compute_zigzag_diagram(f: ZigzagFiltration, max_hom_dim: int = 1) -> PersistenceDiagram:
    """Bars of the zigzag homology module over GF(2), dimensions 0..max_hom_dim."""
    if max_hom_dim < 0:
        raise ValidationError("max_hom_dim must be non-negative")
    if f.max_dim is not None and max_hom_dim > f.max_dim - 1:
        raise ValidationError(
            f"max_hom_dim={max_hom_dim} needs simplices up to dimension {max_hom_dim + 1}, "
            f"but the filtration was truncated at {f.max_dim}"
        )
    n = len(f.complexes)
    intervals: list[Interval] = []
    for k in range(max_hom_dim + 1):
        dims, maps = _homology_zigzag(f, k)
        r = {}

        def rank(i: int, j: int) -> int:
            if i < 0 or j >= n:
                return 0
            if (i, j) not in r:
                r[i, j] = _generalized_rank(dims, maps, i, j)
            return r[i, j]

        for i in range(n):
            for j in range(i, n):
                m = rank(i, j) - rank(i - 1, j) - rank(i, j + 1) + rank(i - 1, j + 1)
                if m < 0:
                    raise ConsistencyError(f"negative multiplicity for bar [{i}, {j}] in dimension {k}")
                if j == n - 1:
                    iv = Interval(k, i + 2, n + 1, True)
                else:
                    iv = Interval(k, i + 2, j + 3, False)
                intervals.extend([iv] * m)
    return PersistenceDiagram(tuple(intervals))


# ---------------------------------------------------------------------------
# Betti numbers via dense boundary matrices; kept separate from the bitset code
# above so it can serve as an independent check.


def gf2_rank(matrix: np.ndarray) -> int:
    m = (np.asarray(matrix) % 2).astype(np.uint8)
    rows, cols = m.shape
    rank = 0
    for c in range(cols):
        if rank == rows:
            break
        nz = np.nonzero(m[rank:, c])[0]
        if nz.size == 0:
            continue
        p = rank + nz[0]
        if p != rank:
            m[[rank, p]] = m[[p, rank]]
        below = np.nonzero(m[:, c])[0]
        below = below[below != rank]
        m[below] ^= m[rank]
        rank += 1
    return rank


def boundary_matrix(c: SimplicialComplex, k: int) -> np.ndarray:
    """Matrix of the boundary map from k-simplices to (k-1)-simplices."""
    rows = c.by_dim(k - 1) if k > 0 else []
    cols = c.by_dim(k)
    row_of = {s: i for i, s in enumerate(rows)}
    m = np.zeros((len(rows), len(cols)), dtype=np.uint8)
    if k > 0:
        for j, s in enumerate(cols):
            for f in combinations(s, k):
                m[row_of[f], j] = 1
    return m


def betti_numbers(c: SimplicialComplex, max_hom_dim: int = 1) -> list[int]:
    ranks = {k: gf2_rank(boundary_matrix(c, k)) for k in range(max_hom_dim + 2)}
    return [len(c.by_dim(k)) - ranks[k] - ranks[k + 1] for k in range(max_hom_dim + 1)]

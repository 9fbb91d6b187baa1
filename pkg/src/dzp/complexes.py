"""Dowker and Vietoris-Rips complexes on hop distance."""
from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from itertools import combinations

from .errors import ValidationError
from .landmarks import LandmarkPartition
from .temporal import Snapshot, hop_distances

Simplex = tuple[int, ...]


@dataclass(frozen=True)
class SimplicialComplex:
    """Face-closed set of strictly sorted vertex tuples.

    ``label`` is the position in a zigzag, stored doubled (time 1.5 -> 3).
    """

    simplices: frozenset[Simplex]
    label: int = 0

    def __post_init__(self):
        object.__setattr__(self, "simplices", frozenset(self.simplices))

    @classmethod
    def from_maximal(cls, maximal: Iterable[Iterable[int]], max_dim: int | None = None, label: int = 0):
        """Close a collection of vertex sets under faces, truncating at ``max_dim``."""
        out: set[Simplex] = set()
        for face in maximal:
            face = tuple(sorted(set(face)))
            top = len(face) if max_dim is None else min(len(face), max_dim + 1)
            for size in range(1, top + 1):
                out.update(combinations(face, size))
        return cls(frozenset(out), label)

    def by_dim(self, k: int) -> list[Simplex]:
        return sorted(s for s in self.simplices if len(s) == k + 1)

    @property
    def dim(self) -> int:
        return max((len(s) for s in self.simplices), default=0) - 1

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(s[0] for s in self.simplices if len(s) == 1)

    def is_face_closed(self) -> bool:
        for s in self.simplices:
            if list(s) != sorted(set(s)):
                return False
            if len(s) > 1 and any(f not in self.simplices for f in combinations(s, len(s) - 1)):
                return False
        return True

    def with_label(self, label: int) -> "SimplicialComplex":
        return SimplicialComplex(self.simplices, label)

    def __le__(self, other: "SimplicialComplex") -> bool:
        return self.simplices <= other.simplices

    def __contains__(self, simplex) -> bool:
        return tuple(simplex) in self.simplices

    def __len__(self) -> int:
        return len(self.simplices)


def _check(delta: int, max_dim: int, min_delta: int) -> None:
    if isinstance(delta, bool) or not isinstance(delta, int) or delta < min_delta:
        raise ValidationError(f"delta must be an integer >= {min_delta}, got {delta!r}")
    if isinstance(max_dim, bool) or not isinstance(max_dim, int) or max_dim < 0:
        raise ValidationError(f"max_dim must be a non-negative integer, got {max_dim!r}")


def dowker_complex(
    s: Snapshot,
    landmarks: Iterable[int],
    witnesses: Iterable[int],
    delta: int,
    max_dim: int = 2,
    label: int = 0,
) -> SimplicialComplex:
    """Simplices on ``landmarks`` sharing a common witness within ``delta`` hops.

    Each witness contributes the full simplex on its delta-ball of landmarks;
    faces come from closure.
    """
    _check(delta, max_dim, 1)
    L = sorted(set(landmarks) & s.nodes)
    W = set(witnesses) & s.nodes
    # BFS from the (usually fewer) landmarks; hop distance is symmetric
    dist = hop_distances(s, L, cutoff=delta)
    balls: dict[int, list[int]] = {w: [] for w in W}
    for l in L:
        for w in W:
            if dist[l][w] <= delta:
                balls[w].append(l)
    maximal = {tuple(b) for b in balls.values() if b}
    return SimplicialComplex.from_maximal(maximal, max_dim, label)


def build_dowker(
    p: LandmarkPartition, s: Snapshot, delta: int, max_dim: int = 2, label: int = 0
) -> SimplicialComplex:
    if p.snapshot_index != s.index or not p.nodes <= s.nodes:
        raise ValidationError(f"landmark partition for snapshot {p.snapshot_index} does not belong to snapshot {s.index}")
    return dowker_complex(s, p.landmarks, p.witnesses, delta, max_dim, label)


def _cliques(nbrs: dict[int, set[int]], max_size: int) -> set[Simplex]:
    out: set[Simplex] = set()

    def extend(clique: tuple[int, ...], candidates: list[int]) -> None:
        out.add(clique)
        if len(clique) == max_size:
            return
        for i, v in enumerate(candidates):
            extend(clique + (v,), [u for u in candidates[i + 1:] if u in nbrs[v]])

    for v in sorted(nbrs):
        extend((v,), sorted(u for u in nbrs[v] if u > v))
    return out


def build_vietoris_rips(s: Snapshot, delta: int, max_dim: int = 2, label: int = 0) -> SimplicialComplex:
    """Cliques of the graph joining nodes at hop distance <= ``delta``."""
    _check(delta, max_dim, 0)
    dist = hop_distances(s, s.nodes, cutoff=delta)
    nbrs = {v: {u for u, d in row.items() if 0 < d <= delta} for v, row in dist.items()}
    return SimplicialComplex(frozenset(_cliques(nbrs, max_dim + 1)), label)

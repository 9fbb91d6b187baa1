"""Greedy epsilon-nets on hop distance, per snapshot and seeded along a window."""
from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass

from .errors import ValidationError
from .temporal import Snapshot, WindowSequence, hop_distances


@dataclass(frozen=True)
class LandmarkPartition:
    snapshot_index: int
    landmarks: frozenset[int]
    witnesses: frozenset[int]
    eps: int

    @property
    def nodes(self) -> frozenset[int]:
        return self.landmarks | self.witnesses


def _eps_balls(s: Snapshot, eps: int) -> dict[int, set[int]]:
    table = hop_distances(s, s.nodes, cutoff=eps)
    return {v: {u for u, d in row.items() if d <= eps} for v, row in table.items()}


def epsilon_degrees(s: Snapshot, eps: int) -> dict[int, int]:
    """Number of *other* nodes within ``eps`` hops of each node."""
    return {v: len(ball) - 1 for v, ball in _eps_balls(s, eps).items()}


def epsilon_net(s: Snapshot, eps: int, seeds: Iterable[int] = ()) -> LandmarkPartition:
    """Maximal eps-separated landmark set, built greedily in eps-degree order.

    The highest-degree seed is taken unconditionally, remaining seeds join if
    they keep separation, then every node is swept in order. Order is
    (eps-degree descending, node id ascending). Seeds absent from ``s`` are
    ignored.
    """
    if isinstance(eps, bool) or not isinstance(eps, int) or eps < 1:
        raise ValidationError(f"eps must be an integer >= 1, got {eps!r}")
    if not s.nodes:
        raise ValidationError(f"snapshot {s.index} is empty")

    balls = _eps_balls(s, eps)

    def rank(v: int):
        return (-(len(balls[v]) - 1), v)

    landmarks: list[int] = []
    covered: set[int] = set()  # union of eps-balls around chosen landmarks

    def take(v: int) -> None:
        landmarks.append(v)
        covered.update(balls[v])

    sorted_seed = sorted({v for v in seeds if v in s.nodes}, key=rank)
    if sorted_seed:
        take(sorted_seed[0])
        for v in sorted_seed[1:]:
            if v not in covered:
                take(v)
    for v in sorted(s.nodes, key=rank):
        if v not in covered:
            take(v)

    L = frozenset(landmarks)
    return LandmarkPartition(s.index, L, s.nodes - L, eps)


def seeded_epsilon_nets(window: WindowSequence | Iterable[Snapshot], eps: int) -> list[LandmarkPartition]:
    """One net per snapshot; each uses the previous snapshot's landmarks as seeds."""
    out: list[LandmarkPartition] = []
    prev: frozenset[int] = frozenset()
    for s in window:
        part = epsilon_net(s, eps, sorted(prev & s.nodes))
        out.append(part)
        prev = part.landmarks
    return out

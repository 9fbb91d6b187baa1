"""Temporal edge lists, snapshots, windows, hop distances and edge-flip noise."""
from __future__ import annotations

import csv
import math
from collections import deque
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import NamedTuple

import numpy as np

from .errors import ParseError, ValidationError

INF = math.inf


class Edge(NamedTuple):
    src: int
    dst: int
    timestamp: int
    weight: float = 1.0


@dataclass(frozen=True)
class TemporalGraph:
    """Timestamped multi-edge list over dense integer node ids.

    ``labels[i]`` is the original string id of node ``i``. Ids are assigned in
    order of first appearance among the kept (non self-loop) edges, so the node
    universe is exactly the set of edge endpoints.
    """

    edges: tuple[Edge, ...]
    labels: tuple[str, ...]
    dropped_self_loops: int = 0

    def __post_init__(self):
        n = len(self.labels)
        for e in self.edges:
            if e.src == e.dst:
                raise ValidationError(f"self-loop on node {e.src}")
            if e.timestamp < 0:
                raise ValidationError(f"negative timestamp {e.timestamp}")
            if not (0 <= e.src < n and 0 <= e.dst < n):
                raise ValidationError(f"edge {e} references an unknown node")

    @property
    def node_universe(self) -> frozenset[int]:
        return frozenset(range(len(self.labels)))

    @classmethod
    def from_pairs(cls, rows: Iterable[tuple], labels: Sequence[str] | None = None) -> "TemporalGraph":
        """Build from ``(src, dst, timestamp[, weight])`` rows with arbitrary hashable ids."""
        ids: dict = {}
        edges = []
        dropped = 0
        for row in rows:
            src, dst, ts = row[0], row[1], int(row[2])
            weight = float(row[3]) if len(row) > 3 else 1.0
            if src == dst:
                dropped += 1
                continue
            for node in (src, dst):
                if node not in ids:
                    ids[node] = len(ids)
            edges.append(Edge(ids[src], ids[dst], ts, weight))
        names = tuple(str(k) for k in ids) if labels is None else tuple(labels)
        return cls(tuple(edges), names, dropped)


def ingest_edges(path: str | Path, directed_policy: str = "symmetrize") -> TemporalGraph:
    """Read a ``src,dst,timestamp[,weight]`` CSV into a :class:`TemporalGraph`."""
    if directed_policy != "symmetrize":
        raise ValidationError(f"unsupported directed_policy {directed_policy!r}")
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if header not in (["src", "dst", "timestamp"], ["src", "dst", "timestamp", "weight"]):
            raise ParseError(f"expected header src,dst,timestamp[,weight], got {','.join(header)}", line=1)
        has_weight = len(header) == 4
        rows = []
        for row in reader:
            line = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) not in (3, 4) or (len(row) == 4 and not has_weight):
                raise ParseError(f"expected {len(header)} fields, got {len(row)}", line=line)
            src, dst = row[0].strip(), row[1].strip()
            if not src or not dst:
                raise ParseError("empty node id", line=line)
            try:
                ts = int(row[2])
            except ValueError:
                raise ParseError(f"timestamp {row[2]!r} is not an integer", line=line) from None
            if ts < 0:
                raise ParseError(f"negative timestamp {ts}", line=line)
            weight = 1.0
            if len(row) == 4:
                try:
                    weight = float(row[3])
                except ValueError:
                    raise ParseError(f"weight {row[3]!r} is not a number", line=line) from None
            rows.append((src, dst, ts, weight))
    g = TemporalGraph.from_pairs(rows)
    if not g.edges:
        raise ParseError(f"{path}: no edges" + (" after dropping self-loops" if rows else ""))
    return g


@dataclass(frozen=True)
class Snapshot:
    """One undirected simple graph of the sequence. ``index`` is 1-based."""

    index: int
    nodes: frozenset[int]
    edges: frozenset[tuple[int, int]] = field(default_factory=frozenset)

    def __post_init__(self):
        normalized = set()
        for u, v in self.edges:
            if u == v:
                raise ValidationError(f"snapshot {self.index}: self-loop on {u}")
            if u not in self.nodes or v not in self.nodes:
                raise ValidationError(f"snapshot {self.index}: edge ({u}, {v}) has an endpoint outside the node set")
            normalized.add((u, v) if u < v else (v, u))
        object.__setattr__(self, "nodes", frozenset(self.nodes))
        object.__setattr__(self, "edges", frozenset(normalized))

    @classmethod
    def from_edges(cls, index: int, edges: Iterable[tuple[int, int]], nodes: Iterable[int] = ()) -> "Snapshot":
        edges = [tuple(e) for e in edges]
        all_nodes = set(nodes)
        for u, v in edges:
            all_nodes.update((u, v))
        return cls(index, frozenset(all_nodes), frozenset(edges))

    @cached_property
    def adjacency(self) -> dict[int, frozenset[int]]:
        nbrs: dict[int, set[int]] = {v: set() for v in self.nodes}
        for u, v in self.edges:
            nbrs[u].add(v)
            nbrs[v].add(u)
        return {v: frozenset(s) for v, s in nbrs.items()}

    def __len__(self) -> int:
        return len(self.nodes)


@dataclass(frozen=True)
class WindowSequence:
    snapshots: tuple[Snapshot, ...]

    def __post_init__(self):
        object.__setattr__(self, "snapshots", tuple(self.snapshots))
        if not self.snapshots:
            raise ValidationError("a window needs at least one snapshot")
        idx = [s.index for s in self.snapshots]
        if idx != list(range(idx[0], idx[0] + len(idx))):
            raise ValidationError(f"window snapshot indices are not consecutive: {idx}")

    @property
    def anchor(self) -> int:
        return self.snapshots[-1].index

    def __len__(self) -> int:
        return len(self.snapshots)

    def __iter__(self):
        return iter(self.snapshots)


def partition_snapshots(g: TemporalGraph, granularity: Mapping[str, int]) -> list[Snapshot]:
    """Split edges into snapshots, by time bucket (``seconds``) or edge chunk (``count``).

    Empty buckets are dropped and the survivors renumbered 1..T.
    """
    if len(granularity) != 1:
        raise ValidationError("granularity must have exactly one of 'seconds' or 'count'")
    (kind, size), = granularity.items()
    if kind not in ("seconds", "count"):
        raise ValidationError(f"unknown granularity {kind!r}")
    if not isinstance(size, int) or isinstance(size, bool) or size <= 0:
        raise ValidationError(f"granularity {kind} must be a positive integer, got {size!r}")

    ordered = sorted(g.edges, key=lambda e: e.timestamp)
    buckets: dict[int, list[Edge]] = {}
    for pos, e in enumerate(ordered):
        key = e.timestamp // size if kind == "seconds" else pos // size
        buckets.setdefault(key, []).append(e)
    if not buckets:
        raise ValidationError("partition produced zero snapshots")
    return [
        Snapshot.from_edges(t, ((e.src, e.dst) for e in buckets[key]))
        for t, key in enumerate(sorted(buckets), start=1)
    ]


def make_windows(snapshots: Sequence[Snapshot], window: int | str) -> list[WindowSequence]:
    """Sliding windows of fixed length, one ``full`` window, or ``expanding`` prefixes."""
    T = len(snapshots)
    if T == 0:
        raise ValidationError("no snapshots to window")
    if window == "full":
        return [WindowSequence(tuple(snapshots))]
    if window == "expanding":
        return [WindowSequence(tuple(snapshots[: t + 1])) for t in range(T)]
    if isinstance(window, bool) or not isinstance(window, int) or not 1 <= window <= T:
        raise ValidationError(f"window must be 'full', 'expanding' or an integer in [1, {T}], got {window!r}")
    return [WindowSequence(tuple(snapshots[t - window: t])) for t in range(window, T + 1)]


def union_graph(a: Snapshot, b: Snapshot) -> Snapshot:
    return Snapshot(a.index, a.nodes | b.nodes, a.edges | b.edges)


def _bfs(adj: Mapping[int, Iterable[int]], source: int, cutoff: float) -> dict[int, int]:
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u]
        if du >= cutoff:
            continue
        for v in adj[u]:
            if v not in dist:
                dist[v] = du + 1
                queue.append(v)
    return dist


def hop_distances(s: Snapshot, sources: Iterable[int], cutoff: float = INF) -> dict[int, dict[int, float]]:
    """Unweighted hop counts from each source to every node of ``s``.

    Distances beyond ``cutoff`` and unreachable pairs are ``inf``.
    """
    if cutoff < 0:
        raise ValidationError("cutoff must be non-negative")
    adj = s.adjacency
    table = {}
    for src in sources:
        row = dict.fromkeys(s.nodes, INF)
        if src in adj:
            row.update(_bfs(adj, src, cutoff))
        table[src] = row
    return table


class Split(NamedTuple):
    train: frozenset[int]
    test: frozenset[int]


def chronological_split(indices: Sequence[int], train_fraction: float = 0.7) -> Split:
    """First ``train_fraction`` of snapshots train, the rest test."""
    idx = sorted(indices)
    cut = int(round(train_fraction * len(idx), 9))
    return Split(frozenset(idx[:cut]), frozenset(idx[cut:]))


def selection_size(ratio: float, n: int) -> int:
    # round first so e.g. 0.1 * 30 does not ceil to 4
    return min(n, math.ceil(round(ratio * n, 9)))


def select_noise_nodes(s: Snapshot, ratio: float, seed: int) -> list[int]:
    k = selection_size(ratio, len(s.nodes))
    if k == 0:
        return []
    rng = np.random.default_rng([seed, s.index])
    picked = rng.choice(np.array(sorted(s.nodes)), size=k, replace=False)
    return sorted(int(v) for v in picked)


def flip_induced(s: Snapshot, selected: Sequence[int]) -> Snapshot:
    """Complement the subgraph induced on ``selected``; node set unchanged."""
    edges = set(s.edges)
    sel = sorted(selected)
    for i, u in enumerate(sel):
        for v in sel[i + 1:]:
            edges ^= {(u, v)}
    return Snapshot(s.index, s.nodes, frozenset(edges))


def inject_noise(
    snapshots: Sequence[Snapshot],
    mode: str,
    ratio: float,
    split: Split | Mapping[str, Iterable[int]] | None = None,
    seed: int = 0,
) -> list[Snapshot]:
    """Flip edges among a seeded random ``ratio`` of nodes per affected snapshot.

    ``evasion`` touches only test snapshots, ``poisoning`` touches all of them.
    Flipping is restricted to pairs of selected nodes.
    """
    if mode not in ("evasion", "poisoning"):
        raise ValidationError(f"noise mode must be 'evasion' or 'poisoning', got {mode!r}")
    if not 0.0 <= ratio <= 1.0 or math.isnan(ratio):
        raise ValidationError(f"noise ratio must lie in [0, 1], got {ratio}")
    indices = [s.index for s in snapshots]
    if split is None:
        split = chronological_split(indices)
    elif isinstance(split, Mapping):
        split = Split(frozenset(split["train"]), frozenset(split["test"]))
    if split.train & split.test or (split.train | split.test) != set(indices):
        raise ValidationError("noise split must partition the snapshot indices")

    affected = split.test if mode == "evasion" else split.train | split.test
    out = []
    for s in snapshots:
        if s.index in affected and ratio > 0:
            s = flip_induced(s, select_noise_nodes(s, ratio, seed))
        out.append(s)
    return out

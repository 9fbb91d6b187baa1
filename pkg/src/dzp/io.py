"""Readers and writers for every on-disk artifact.

All writers emit ``\\n`` line endings and deterministic row order so bundles
can be compared byte for byte. Floats use ``repr`` (shortest round-trip).
"""
from __future__ import annotations

import csv
import json
from collections.abc import Iterable, Sequence
from pathlib import Path

import numpy as np

from .complexes import SimplicialComplex
from .errors import ParseError
from .landmarks import LandmarkPartition
from .temporal import Snapshot
from .vectorize import PersistenceImage
from .zigzag import Interval, PersistenceDiagram


def _writer(fh):
    return csv.writer(fh, lineterminator="\n")


def _open_w(path: str | Path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    return path.open("w", newline="", encoding="utf-8")


def _rows(path: str | Path, header: Sequence[str] | None):
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        if header is not None:
            got = next(reader, None)
            if got != list(header):
                raise ParseError(f"{path}: expected header {','.join(header)}, got {got}", line=1)
        for row in reader:
            if row:
                yield reader.line_num, row


# -- nodes / snapshots ---------------------------------------------------------


def write_nodes(labels: Sequence[str], path: str | Path) -> None:
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(["id", "label"])
        w.writerows(enumerate(labels))


def read_nodes(path: str | Path) -> list[str]:
    return [row[1] for _, row in _rows(path, ["id", "label"])]


def write_snapshots(snapshots: Iterable[Snapshot], path: str | Path) -> None:
    """``snapshot,src,dst``; an isolated node is a row with empty ``dst``."""
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(["snapshot", "src", "dst"])
        for s in snapshots:
            for u, v in sorted(s.edges):
                w.writerow([s.index, u, v])
            touched = {x for e in s.edges for x in e}
            for v in sorted(s.nodes - touched):
                w.writerow([s.index, v, ""])


def read_snapshots(path: str | Path) -> list[Snapshot]:
    nodes: dict[int, set[int]] = {}
    edges: dict[int, set[tuple[int, int]]] = {}
    for line, row in _rows(path, ["snapshot", "src", "dst"]):
        try:
            t, u = int(row[0]), int(row[1])
            nodes.setdefault(t, set()).add(u)
            edges.setdefault(t, set())
            if len(row) > 2 and row[2] != "":
                v = int(row[2])
                nodes[t].add(v)
                edges[t].add((u, v))
        except (ValueError, IndexError):
            raise ParseError(f"{path}: malformed snapshot row {row}", line=line) from None
    if not nodes:
        raise ParseError(f"{path}: no snapshots")
    return [Snapshot(t, frozenset(nodes[t]), frozenset(edges[t])) for t in sorted(nodes)]


# -- landmarks / complexes -------------------------------------------------------


def write_landmarks(parts: Iterable[LandmarkPartition], path: str | Path) -> None:
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(["snapshot", "node", "role"])
        for p in parts:
            roles = [(v, "landmark") for v in p.landmarks] + [(v, "witness") for v in p.witnesses]
            for v, role in sorted(roles):
                w.writerow([p.snapshot_index, v, role])


def read_landmarks(path: str | Path, eps: int = 1) -> list[LandmarkPartition]:
    L: dict[int, set[int]] = {}
    W: dict[int, set[int]] = {}
    for line, row in _rows(path, ["snapshot", "node", "role"]):
        t, v, role = int(row[0]), int(row[1]), row[2]
        if role not in ("landmark", "witness"):
            raise ParseError(f"unknown role {role!r}", line=line)
        (L if role == "landmark" else W).setdefault(t, set()).add(v)
        (W if role == "landmark" else L).setdefault(t, set())
    return [LandmarkPartition(t, frozenset(L[t]), frozenset(W[t]), eps) for t in sorted(L)]


def write_complex(c: SimplicialComplex, path: str | Path) -> None:
    """``dim,v0,v1,...``, one simplex per row, sorted by (dim, vertices)."""
    width = max((len(s) for s in c.simplices), default=1)
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(["dim"] + [f"v{i}" for i in range(width)])
        for s in sorted(c.simplices, key=lambda s: (len(s), s)):
            w.writerow([len(s) - 1, *s])


def read_complex(path: str | Path, label: int = 0) -> SimplicialComplex:
    out = []
    for line, row in _rows(path, None):
        if row[0] == "dim":
            continue
        verts = tuple(int(v) for v in row[1:] if v != "")
        if len(verts) != int(row[0]) + 1:
            raise ParseError(f"{path}: dimension does not match vertex count", line=line)
        out.append(verts)
    return SimplicialComplex(frozenset(out), label)


# -- diagrams ------------------------------------------------------------------------


def write_diagram(d: PersistenceDiagram, path: str | Path) -> None:
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(["dim", "birth_x2", "death_x2", "open"])
        for iv in d.intervals:
            w.writerow([iv.dim, iv.birth_x2, iv.death_x2, int(iv.open)])


def read_diagram(path: str | Path) -> PersistenceDiagram:
    ivs = []
    for line, row in _rows(path, ["dim", "birth_x2", "death_x2", "open"]):
        try:
            ivs.append(Interval(int(row[0]), int(row[1]), int(row[2]), bool(int(row[3]))))
        except (ValueError, IndexError):
            raise ParseError(f"{path}: malformed interval {row}", line=line) from None
    return PersistenceDiagram(tuple(ivs))


# -- images ----------------------------------------------------------------------------


def write_matrix(pixels: np.ndarray, path: str | Path) -> None:
    with _open_w(path) as fh:
        w = _writer(fh)
        for row in pixels:
            w.writerow([repr(float(v)) for v in row])


def read_matrix(path: str | Path) -> np.ndarray:
    return np.array([[float(v) for v in row] for _, row in _rows(path, None)])


def write_zpi(img: PersistenceImage, stem: str | Path) -> None:
    """``stem.csv`` pixels, ``stem.json`` render parameters, ``stem.pgm`` preview."""
    stem = Path(stem)
    write_matrix(img.pixels, stem.with_suffix(".csv"))
    meta = {
        "dim": img.dim,
        "size": img.size,
        "bounds": list(img.bounds),
        "theta": img.theta,
        "weight_scale": img.weight_scale,
    }
    with _open_w(stem.with_suffix(".json")) as fh:
        fh.write(json.dumps(meta, indent=2, sort_keys=True) + "\n")
    write_pgm(img.pixels, stem.with_suffix(".pgm"))


def read_zpi_meta(path: str | Path) -> dict:
    return json.loads(Path(path).read_text(encoding="utf-8"))


def write_pgm(pixels: np.ndarray, path: str | Path, maxval: int = 65535) -> None:
    """ASCII graymap scaled to the image maximum, highest persistence on top."""
    top = float(pixels.max()) if pixels.size else 0.0
    scaled = np.zeros(pixels.shape, dtype=int) if top <= 0 else np.rint(pixels / top * maxval).astype(int)
    h, w = scaled.shape
    with _open_w(path) as fh:
        fh.write(f"P2\n{w} {h}\n{maxval}\n")
        for row in scaled[::-1]:
            fh.write(" ".join(str(v) for v in row) + "\n")


def write_lr_log(rates: Iterable[tuple[int, float]], path: str | Path) -> None:
    with _open_w(path) as fh:
        w = _writer(fh)
        w.writerow(["t", "r"])
        for t, r in rates:
            w.writerow([t, repr(float(r))])

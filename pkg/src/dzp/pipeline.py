"""End-to-end pipeline: edges -> snapshots -> windows -> diagrams -> ZPIs -> rates.

Each stage is a plain function over in-memory objects; ``run_pipeline`` chains
them and writes the bundle. The CLI's standalone subcommands reload the files
written by earlier stages and call the same functions.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

from . import io
from .adaptor import AdaptorNetwork, adaptor_forward, load_params, save_params
from .config import PipelineConfig
from .errors import DZPError, StageError
from .meta import run_meta_schedule
from .temporal import Snapshot, WindowSequence, ingest_edges, inject_noise, make_windows, partition_snapshots
from .vectorize import DeltaImage, PersistenceImage, delta_zpi, render_zpi, resolve_bounds, transform_diagram
from .zigzag import PersistenceDiagram, ZigzagFiltration, assemble_zigzag, compute_zigzag_diagram

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class WindowResult:
    window: WindowSequence
    filtration: ZigzagFiltration
    diagram: PersistenceDiagram

    @property
    def anchor(self) -> int:
        return self.window.anchor


def window_dir(root: Path, anchor: int) -> Path:
    return root / "windows" / f"t{anchor:04d}"


def pool_width() -> int:
    raw = os.environ.get("DZP_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _stage(name: str, snapshot: int | None, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except StageError:
        raise
    except (DZPError, ValueError, OSError) as exc:
        raise StageError(name, snapshot, exc) from exc


# -- stages -------------------------------------------------------------------


def load_snapshots(cfg: PipelineConfig) -> tuple[tuple[str, ...], list[Snapshot]]:
    g = _stage("ingest", None, ingest_edges, cfg.resolved_input())
    if g.dropped_self_loops:
        log.info("dropped %d self-loop rows", g.dropped_self_loops)
    snaps = _stage("snapshot", None, partition_snapshots, g, cfg.granularity)
    return g.labels, snaps


def apply_noise(cfg: PipelineConfig, snapshots: Sequence[Snapshot]) -> list[Snapshot]:
    if cfg.noise is None:
        return list(snapshots)
    n = cfg.noise
    return _stage("noise", None, inject_noise, snapshots, n.mode, n.ratio, n.split, n.seed)


def compute_window(cfg: PipelineConfig, window: WindowSequence) -> WindowResult:
    f = _stage("zigzag", window.anchor, assemble_zigzag, window, cfg.backend, cfg.eps, cfg.delta, cfg.max_dim)
    d = _stage("zigzag", window.anchor, compute_zigzag_diagram, f, cfg.max_hom_dim)
    return WindowResult(window, f, d)


def compute_windows(cfg: PipelineConfig, snapshots: Sequence[Snapshot]) -> list[WindowResult]:
    windows = _stage("window", None, make_windows, snapshots, cfg.window)
    with ThreadPoolExecutor(max_workers=pool_width()) as pool:
        return list(pool.map(lambda w: compute_window(cfg, w), windows))


def render_params(cfg: PipelineConfig, diagrams: Sequence[PersistenceDiagram], dim: int):
    """One render box and bandwidth shared by every window, so images line up."""
    pts = [p for d in diagrams for p in transform_diagram(d, dim)]
    return resolve_bounds(pts, cfg.zpi.bounds, cfg.zpi.theta)


def render_images(cfg: PipelineConfig, diagrams: Sequence[PersistenceDiagram]) -> list[dict[int, PersistenceImage]]:
    out: list[dict[int, PersistenceImage]] = [{} for _ in diagrams]
    for k in range(cfg.max_hom_dim + 1):
        box, theta = _stage("zpi", None, render_params, cfg, diagrams, k)
        for i, d in enumerate(diagrams):
            out[i][k] = render_zpi(transform_diagram(d, k), cfg.zpi.size, theta, box, k)
    return out


def image_deltas(
    anchors: Sequence[int], images: Sequence[dict[int, PersistenceImage]]
) -> list[tuple[int, dict[int, DeltaImage]]]:
    """Difference between each window's images and the previous window's."""
    return [
        (anchors[i], {k: delta_zpi(images[i - 1][k], images[i][k]) for k in sorted(images[i])})
        for i in range(1, len(images))
    ]


def make_adaptor(cfg: PipelineConfig) -> AdaptorNetwork:
    if cfg.adaptor.params is not None:
        p = Path(cfg.adaptor.params)
        net = load_params(p if p.is_absolute() else Path(cfg.base_dir) / p)
        if net.in_channels != cfg.max_hom_dim + 1 or net.size != cfg.zpi.size:
            raise StageError("adapt", None, ValueError("saved adaptor does not match max_hom_dim/zpi.size"))
        return net
    return AdaptorNetwork.initialize(cfg.max_hom_dim + 1, cfg.zpi.size, seed=cfg.seed)


def learning_rates(net: AdaptorNetwork, deltas) -> list[tuple[int, float]]:
    return [
        (t, _stage("adapt", t, adaptor_forward, net, [d[k] for k in sorted(d)]))
        for t, d in deltas
    ]


def landmark_sets(results: Sequence[WindowResult]) -> dict[int, frozenset[int]]:
    out = {}
    for res in results:
        for p in res.filtration.partitions or ():
            out[p.snapshot_index] = p.landmarks
    return out


# -- writers -------------------------------------------------------------------


def write_window(root: Path, res: WindowResult) -> None:
    wdir = window_dir(root, res.anchor)
    if res.filtration.partitions is not None:
        io.write_landmarks(res.filtration.partitions, wdir / "landmarks.csv")
    for c in res.filtration.complexes:
        io.write_complex(c, wdir / f"complex_{c.label:04d}.csv")
    io.write_diagram(res.diagram, wdir / "diagram.csv")


def write_images(root: Path, anchor: int, images: dict[int, PersistenceImage]) -> None:
    for k, img in sorted(images.items()):
        io.write_zpi(img, window_dir(root, anchor) / f"zpi_k{k}")


def write_deltas(root: Path, deltas) -> None:
    for t, d in deltas:
        for k, img in sorted(d.items()):
            io.write_matrix(img.pixels, window_dir(root, t) / f"delta_k{k}.csv")


def write_meta_log(steps, path: Path) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        fh.write("t,r,loss,phase\n")
        for s in steps:
            fh.write(f"{s.t},{s.r!r},{s.loss!r},{s.phase}\n")


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def write_manifest(root: Path, cfg: PipelineConfig) -> Path:
    files = {
        p.relative_to(root).as_posix(): _sha256(p)
        for p in sorted(root.rglob("*"))
        if p.is_file() and p.name != "manifest.json"
    }
    manifest = {
        "config_sha256": cfg.digest(),
        "input_sha256": _sha256(cfg.resolved_input()),
        "files": files,
    }
    path = root / "manifest.json"
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def run_pipeline(cfg: PipelineConfig, out_dir: str | Path | None = None) -> Path:
    """Run every stage and write the bundle; returns the output directory."""
    root = Path(out_dir if out_dir is not None else cfg.output_dir)
    root.mkdir(parents=True, exist_ok=True)
    (root / "config.json").write_text(json.dumps(cfg.to_dict(), indent=2, sort_keys=True) + "\n", encoding="utf-8")

    labels, snaps = load_snapshots(cfg)
    snaps = apply_noise(cfg, snaps)
    io.write_nodes(labels, root / "nodes.csv")
    io.write_snapshots(snaps, root / "snapshots.csv")

    results = compute_windows(cfg, snaps)
    for res in results:
        write_window(root, res)

    images = render_images(cfg, [r.diagram for r in results])
    anchors = [r.anchor for r in results]
    for a, imgs in zip(anchors, images):
        write_images(root, a, imgs)
    deltas = image_deltas(anchors, images)
    write_deltas(root, deltas)

    net = make_adaptor(cfg)
    save_params(net, root / "adaptor_params.csv")
    rates = learning_rates(net, deltas)
    io.write_lr_log(rates, root / "lr_log.csv")
    _, steps = run_meta_schedule(
        snaps, dict(rates), cfg.adaptor.eta, cfg.adaptor.schedule, landmark_sets(results), seed=cfg.seed
    )
    write_meta_log(steps, root / "meta_log.csv")

    write_manifest(root, cfg)
    return root

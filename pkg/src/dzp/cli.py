"""``dzp`` command line.

Every subcommand reads the JSON config (``--config``, defaults when omitted)
and works inside the output directory (``--out``, else ``output_dir`` from the
config), so stages can be run one at a time:

    dzp snapshot  -> nodes.csv, snapshots.csv
    dzp noise     -> snapshots_noisy.csv
    dzp landmarks -> windows/tNNNN/landmarks.csv
    dzp zigzag    -> windows/tNNNN/complex_*.csv, diagram.csv
    dzp zpi       -> windows/tNNNN/zpi_k*.{csv,json,pgm}
    dzp delta     -> windows/tNNNN/delta_k*.csv
    dzp adapt     -> adaptor_params.csv, lr_log.csv, meta_log.csv
    dzp pipeline  -> all of the above plus manifest.json
    dzp bottleneck A.csv B.csv

Exit status: 0 success, 1 invalid input or config, 2 internal consistency failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import io, pipeline
from .adaptor import save_params
from .config import PipelineConfig, parse_config
from .errors import ConsistencyError, DZPError, StageError, ValidationError
from .landmarks import seeded_epsilon_nets
from .meta import run_meta_schedule
from .metrics import bottleneck_by_dim
from .temporal import make_windows
from .vectorize import DeltaImage, PersistenceImage, transform_diagram

log = logging.getLogger("dzp")


def _out(args, cfg: PipelineConfig) -> Path:
    root = Path(args.out) if args.out else Path(cfg.output_dir)
    root.mkdir(parents=True, exist_ok=True)
    return root


def _snapshots_path(args, root: Path) -> Path:
    return Path(args.snapshots) if getattr(args, "snapshots", None) else root / "snapshots.csv"


def _window_dirs(root: Path) -> list[tuple[int, Path]]:
    dirs = sorted((root / "windows").glob("t[0-9]*"))
    if not dirs:
        raise ValidationError(f"no window directories under {root / 'windows'}; run 'dzp zigzag' first")
    return [(int(d.name[1:]), d) for d in dirs]


def cmd_snapshot(args, cfg):
    root = _out(args, cfg)
    labels, snaps = pipeline.load_snapshots(cfg)
    io.write_nodes(labels, root / "nodes.csv")
    io.write_snapshots(snaps, root / "snapshots.csv")
    print(f"{len(snaps)} snapshots -> {root / 'snapshots.csv'}")


def cmd_noise(args, cfg):
    if cfg.noise is None:
        raise ValidationError("config has no 'noise' section")
    root = _out(args, cfg)
    snaps = pipeline.apply_noise(cfg, io.read_snapshots(_snapshots_path(args, root)))
    target = Path(args.output) if args.output else root / "snapshots_noisy.csv"
    io.write_snapshots(snaps, target)
    print(f"{cfg.noise.mode} noise at ratio {cfg.noise.ratio} -> {target}")


def cmd_landmarks(args, cfg):
    root = _out(args, cfg)
    if cfg.backend != "dowker":
        print(f"backend {cfg.backend!r} uses every node; no landmarks written")
        return
    snaps = io.read_snapshots(_snapshots_path(args, root))
    for w in make_windows(snaps, cfg.window):
        parts = pipeline._stage("landmarks", w.anchor, seeded_epsilon_nets, w, cfg.eps)
        io.write_landmarks(parts, pipeline.window_dir(root, w.anchor) / "landmarks.csv")
    print(f"landmarks -> {root / 'windows'}")


def cmd_zigzag(args, cfg):
    root = _out(args, cfg)
    snaps = io.read_snapshots(_snapshots_path(args, root))
    for res in pipeline.compute_windows(cfg, snaps):
        pipeline.write_window(root, res)
        print(f"window t={res.anchor}: {len(res.diagram)} intervals")


def cmd_zpi(args, cfg):
    root = _out(args, cfg)
    wins = _window_dirs(root)
    diagrams = [io.read_diagram(d / "diagram.csv") for _, d in wins]
    for (t, _), imgs in zip(wins, pipeline.render_images(cfg, diagrams)):
        pipeline.write_images(root, t, imgs)
    print(f"{len(wins)} x {cfg.max_hom_dim + 1} images -> {root / 'windows'}")


def _load_image(wdir: Path, k: int) -> PersistenceImage:
    meta = io.read_zpi_meta(wdir / f"zpi_k{k}.json")
    pts = transform_diagram(io.read_diagram(wdir / "diagram.csv"), k)
    return PersistenceImage(
        io.read_matrix(wdir / f"zpi_k{k}.csv"), tuple(meta["bounds"]), meta["theta"], k, tuple(pts), meta["weight_scale"]
    )


def cmd_delta(args, cfg):
    root = _out(args, cfg)
    wins = _window_dirs(root)
    images = [{k: _load_image(d, k) for k in range(cfg.max_hom_dim + 1)} for _, d in wins]
    deltas = pipeline.image_deltas([t for t, _ in wins], images)
    pipeline.write_deltas(root, deltas)
    print(f"{len(deltas)} deltas -> {root / 'windows'}")


def cmd_adapt(args, cfg):
    root = _out(args, cfg)
    wins = _window_dirs(root)
    deltas = []
    for t, d in wins[1:]:
        deltas.append((t, {k: DeltaImage(io.read_matrix(d / f"delta_k{k}.csv"), (0, 1, 0, 1), k)
                           for k in range(cfg.max_hom_dim + 1)}))
    net = pipeline.make_adaptor(cfg)
    save_params(net, root / "adaptor_params.csv")
    rates = pipeline.learning_rates(net, deltas)
    io.write_lr_log(rates, root / "lr_log.csv")
    landmarks = {}
    for _, d in wins:
        if (d / "landmarks.csv").exists():
            for p in io.read_landmarks(d / "landmarks.csv", cfg.eps):
                landmarks[p.snapshot_index] = p.landmarks
    snaps = io.read_snapshots(_snapshots_path(args, root))
    _, steps = run_meta_schedule(snaps, dict(rates), cfg.adaptor.eta, cfg.adaptor.schedule, landmarks, seed=cfg.seed)
    pipeline.write_meta_log(steps, root / "meta_log.csv")
    for t, r in rates:
        print(f"t={t} r={r:.6f}")


def cmd_bottleneck(args, cfg):
    a, b = io.read_diagram(args.a), io.read_diagram(args.b)
    dims = [args.dim] if args.dim is not None else list(range(cfg.max_hom_dim + 1))
    dists = bottleneck_by_dim(a, b, dims)
    for k, v in dists.items():
        print(f"dim {k}: {v!r}")
    print(f"max: {max(dists.values())!r}")


def cmd_pipeline(args, cfg):
    root = pipeline.run_pipeline(cfg, _out(args, cfg))
    print(f"bundle -> {root}")


COMMANDS = {
    "snapshot": (cmd_snapshot, "partition the edge list into snapshots"),
    "noise": (cmd_noise, "flip edges among randomly selected nodes"),
    "landmarks": (cmd_landmarks, "seeded epsilon-nets per window"),
    "zigzag": (cmd_zigzag, "complexes and zigzag diagrams per window"),
    "zpi": (cmd_zpi, "render persistence images from diagrams"),
    "delta": (cmd_delta, "differences of consecutive window images"),
    "bottleneck": (cmd_bottleneck, "bottleneck distance between two diagram CSVs"),
    "adapt": (cmd_adapt, "learning rates from image differences and the toy meta-loop"),
    "pipeline": (cmd_pipeline, "run every stage and write a manifest"),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="dzp", description="Dowker zigzag persistence for dynamic graphs.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, help_text) in COMMANDS.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON config (defaults if omitted)")
        p.add_argument("--out", help="output directory (overrides output_dir)")
        if name in ("noise", "landmarks", "zigzag", "adapt"):
            p.add_argument("--snapshots", help="snapshot CSV (default: OUT/snapshots.csv)")
        if name == "noise":
            p.add_argument("--output", help="noisy snapshot CSV (default: OUT/snapshots_noisy.csv)")
        if name == "bottleneck":
            p.add_argument("a")
            p.add_argument("b")
            p.add_argument("--dim", type=int)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        cfg = parse_config(args.config)
        COMMANDS[args.command][0](args, cfg)
    except StageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2 if isinstance(exc.cause, ConsistencyError) else 1
    except ConsistencyError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return 2
    except (ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DZPError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())

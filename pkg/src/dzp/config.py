"""Strict JSON configuration for the pipeline and CLI."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Any

from .errors import ConfigError

TOY_DATASET = "toy_edges.csv"


def toy_dataset_path() -> Path:
    return Path(str(resources.files("dzp") / "data" / TOY_DATASET))


@dataclass(frozen=True)
class ZPIConfig:
    size: int = 50
    theta: float | None = None  # None -> 0.1 x diagonal of the reference box
    bounds: str | tuple[float, float, float, float] = "auto"


@dataclass(frozen=True)
class NoiseConfig:
    mode: str
    ratio: float
    seed: int = 0
    split: dict[str, list[int]] | None = None  # None -> first 70% train


@dataclass(frozen=True)
class AdaptorConfig:
    eta: float = 0.1
    schedule: str = "live"
    params: str | None = None  # saved network; None -> fresh network seeded by ``seed``


@dataclass(frozen=True)
class PipelineConfig:
    input_path: str | None = None  # None -> bundled toy dataset
    granularity: dict[str, int] = field(default_factory=lambda: {"seconds": 1})
    eps: int = 1
    delta: int = 1
    window: int | str = "full"
    max_hom_dim: int = 1
    zpi: ZPIConfig = field(default_factory=ZPIConfig)
    noise: NoiseConfig | None = None
    backend: str = "dowker"
    output_dir: str = "dzp_out"
    seed: int = 0
    adaptor: AdaptorConfig = field(default_factory=AdaptorConfig)
    base_dir: str = field(default=".", compare=False, repr=False)

    @property
    def max_dim(self) -> int:
        return self.max_hom_dim + 1

    def resolved_input(self) -> Path:
        if self.input_path is None:
            return toy_dataset_path()
        p = Path(self.input_path)
        return p if p.is_absolute() else Path(self.base_dir) / p

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d.pop("base_dir")
        if isinstance(d["zpi"]["bounds"], tuple):
            d["zpi"]["bounds"] = list(d["zpi"]["bounds"])
        return d

    def digest(self) -> str:
        blob = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()


def _is_int(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool)


def _is_num(v) -> bool:
    return (isinstance(v, (int, float))) and not isinstance(v, bool)


def _strict_keys(obj: Any, allowed, prefix: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError(prefix.rstrip(".") or "<root>", f"expected an object, got {type(obj).__name__}")
    for k in obj:
        if k not in allowed:
            raise ConfigError(f"{prefix}{k}", "unknown key")
    return obj


def _int(obj: dict, key: str, default: int, lo: int, prefix: str = "") -> int:
    v = obj.get(key, default)
    if not _is_int(v):
        raise ConfigError(prefix + key, f"expected an integer, got {v!r}")
    if v < lo:
        raise ConfigError(prefix + key, f"must be >= {lo}, got {v}")
    return v


def config_from_dict(raw: dict, base_dir: str | Path = ".") -> PipelineConfig:
    top = set(PipelineConfig.__dataclass_fields__) - {"base_dir"}
    raw = _strict_keys(raw, top, "")

    inp = raw.get("input_path")
    if inp is not None and not isinstance(inp, str):
        raise ConfigError("input_path", "expected a string path")

    gran = raw.get("granularity", {"seconds": 1})
    _strict_keys(gran, {"seconds", "count"}, "granularity.")
    if len(gran) != 1:
        raise ConfigError("granularity", "give exactly one of 'seconds' or 'count'")
    (gk, gv), = gran.items()
    if not _is_int(gv) or gv <= 0:
        raise ConfigError(f"granularity.{gk}", f"must be a positive integer, got {gv!r}")

    window = raw.get("window", "full")
    if isinstance(window, str):
        if window not in ("full", "expanding"):
            raise ConfigError("window", f"expected 'full', 'expanding' or a positive integer, got {window!r}")
    elif not _is_int(window) or window < 1:
        raise ConfigError("window", f"expected 'full', 'expanding' or a positive integer, got {window!r}")

    backend = raw.get("backend", "dowker")
    if backend not in ("dowker", "vr"):
        raise ConfigError("backend", f"expected 'dowker' or 'vr', got {backend!r}")

    zraw = _strict_keys(raw.get("zpi", {}), {"size", "theta", "bounds"}, "zpi.")
    theta = zraw.get("theta")
    if theta is not None and (not _is_num(theta) or theta <= 0):
        raise ConfigError("zpi.theta", f"must be a positive number or null, got {theta!r}")
    bounds = zraw.get("bounds", "auto")
    if bounds != "auto":
        if (
            not isinstance(bounds, list)
            or len(bounds) != 4
            or not all(_is_num(b) for b in bounds)
            or not (bounds[0] < bounds[1] and bounds[2] < bounds[3])
        ):
            raise ConfigError("zpi.bounds", "expected 'auto' or [x_min, x_max, y_min, y_max] with min < max")
        bounds = tuple(float(b) for b in bounds)
    zpi = ZPIConfig(_int(zraw, "size", 50, 1, "zpi."), None if theta is None else float(theta), bounds)

    noise = None
    if raw.get("noise") is not None:
        nraw = _strict_keys(raw["noise"], {"mode", "ratio", "seed", "split"}, "noise.")
        mode = nraw.get("mode")
        if mode not in ("evasion", "poisoning"):
            raise ConfigError("noise.mode", f"expected 'evasion' or 'poisoning', got {mode!r}")
        ratio = nraw.get("ratio")
        if not _is_num(ratio) or not 0 <= ratio <= 1:
            raise ConfigError("noise.ratio", f"must be a number in [0, 1], got {ratio!r}")
        split = nraw.get("split")
        if split is not None:
            _strict_keys(split, {"train", "test"}, "noise.split.")
            for part in ("train", "test"):
                vals = split.get(part)
                if not isinstance(vals, list) or not all(_is_int(v) for v in vals):
                    raise ConfigError(f"noise.split.{part}", "expected a list of snapshot indices")
        noise = NoiseConfig(mode, float(ratio), _int(nraw, "seed", 0, 0, "noise."), split)

    araw = _strict_keys(raw.get("adaptor", {}), {"eta", "schedule", "params"}, "adaptor.")
    eta = araw.get("eta", 0.1)
    if not _is_num(eta) or eta <= 0:
        raise ConfigError("adaptor.eta", f"must be a positive number, got {eta!r}")
    schedule = araw.get("schedule", "live")
    if schedule not in ("live", "window"):
        raise ConfigError("adaptor.schedule", f"expected 'live' or 'window', got {schedule!r}")
    params = araw.get("params")
    if params is not None and not isinstance(params, str):
        raise ConfigError("adaptor.params", "expected a path string or null")

    out = raw.get("output_dir", "dzp_out")
    if not isinstance(out, str) or not out:
        raise ConfigError("output_dir", "expected a non-empty string")

    return PipelineConfig(
        input_path=inp,
        granularity={gk: gv},
        eps=_int(raw, "eps", 1, 1),
        delta=_int(raw, "delta", 1, 1 if backend == "dowker" else 0),
        window=window,
        max_hom_dim=_int(raw, "max_hom_dim", 1, 0),
        zpi=zpi,
        noise=noise,
        backend=backend,
        output_dir=out,
        seed=_int(raw, "seed", 0, 0),
        adaptor=AdaptorConfig(float(eta), schedule, params),
        base_dir=str(base_dir),
    )


def parse_config(path: str | Path | None) -> PipelineConfig:
    """Load and validate a JSON config; ``None`` gives all defaults."""
    if path is None:
        return config_from_dict({})
    path = Path(path)
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError("<file>", f"{path} does not exist") from None
    except json.JSONDecodeError as exc:
        raise ConfigError("<file>", f"invalid JSON: {exc}") from None
    return config_from_dict(raw, path.parent)

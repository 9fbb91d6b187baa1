"""Dowker zigzag persistence signatures for discrete-time dynamic graphs."""
from __future__ import annotations

from .adaptor import (
    AdaptorNetwork,
    adaptor_forward,
    adaptor_gradients,
    load_params,
    save_params,
    train_adaptor_step,
)
from .complexes import SimplicialComplex, build_dowker, build_vietoris_rips
from .config import PipelineConfig, parse_config
from .errors import ConfigError, ConsistencyError, DZPError, ParseError, StageError, ValidationError
from .landmarks import LandmarkPartition, epsilon_net, seeded_epsilon_nets
from .meta import ToyModel, meta_update, run_meta_schedule
from .metrics import bottleneck_distance
from .pipeline import run_pipeline
from .temporal import (
    Snapshot,
    TemporalGraph,
    WindowSequence,
    hop_distances,
    ingest_edges,
    inject_noise,
    make_windows,
    partition_snapshots,
    union_graph,
)
from .vectorize import PersistenceImage, delta_zpi, render_zpi, transform_diagram
from .zigzag import (
    Interval,
    PersistenceDiagram,
    ZigzagFiltration,
    assemble_zigzag,
    betti_numbers,
    compute_zigzag_diagram,
)

__version__ = "0.1.0"

__all__ = [
    "AdaptorNetwork", "ConfigError", "ConsistencyError", "DZPError", "Interval", "LandmarkPartition",
    "ParseError", "PersistenceDiagram", "PersistenceImage", "PipelineConfig", "SimplicialComplex",
    "Snapshot", "StageError", "TemporalGraph", "ToyModel", "ValidationError", "WindowSequence",
    "ZigzagFiltration", "adaptor_forward", "adaptor_gradients", "assemble_zigzag", "betti_numbers",
    "bottleneck_distance", "build_dowker", "build_vietoris_rips", "compute_zigzag_diagram", "delta_zpi",
    "epsilon_net", "hop_distances", "ingest_edges", "inject_noise", "load_params", "make_windows",
    "meta_update", "parse_config", "partition_snapshots", "render_zpi", "run_meta_schedule",
    "run_pipeline", "save_params", "seeded_epsilon_nets", "train_adaptor_step", "transform_diagram",
    "union_graph",
]

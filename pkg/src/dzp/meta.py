"""Toy downstream model and the topology-scaled meta-update.

The downstream model is a logistic edge scorer on three pair features. It
stands in for a dynamic GNN: what matters here is that every step is
``w <- w - eta * r * grad`` with ``r`` coming from the adaptor.
"""
from __future__ import annotations

import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ValidationError
from .temporal import Snapshot

FEATURES = ("common_neighbors", "log_degree_product", "landmark_pair", "bias")


@dataclass(frozen=True, eq=False)
class ToyModel:
    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if not np.all(np.isfinite(w)):
            raise ValidationError("model weights must be finite")
        object.__setattr__(self, "weights", w)

    @classmethod
    def zeros(cls) -> "ToyModel":
        return cls(np.zeros(len(FEATURES)))

    def predict(self, X: np.ndarray) -> np.ndarray:
        return 1.0 / (1.0 + np.exp(-(X @ self.weights)))


def pair_features(s: Snapshot, pairs: Sequence[tuple[int, int]], landmarks=frozenset()) -> np.ndarray:
    adj = s.adjacency
    empty: frozenset[int] = frozenset()
    rows = []
    for u, v in pairs:
        nu, nv = adj.get(u, empty), adj.get(v, empty)
        rows.append((
            len(nu & nv),
            math.log1p(len(nu) * len(nv)),
            float(u in landmarks and v in landmarks),
            1.0,
        ))
    return np.array(rows, dtype=float).reshape(-1, len(FEATURES))


def link_task(current: Snapshot, following: Snapshot, landmarks=frozenset(), seed: int = 0):
    """Features on ``current`` for the edges of ``following`` plus as many sampled non-edges."""
    pos = sorted(following.edges)
    nodes = np.array(sorted(current.nodes | following.nodes))
    rng = np.random.default_rng([seed, following.index])
    neg: set[tuple[int, int]] = set()
    budget = 50 * max(len(pos), 1)
    while len(neg) < len(pos) and budget and len(nodes) > 1:
        budget -= 1
        u, v = (int(a) for a in rng.choice(nodes, 2, replace=False))
        pair = (min(u, v), max(u, v))
        if pair not in following.edges:
            neg.add(pair)
    pairs = pos + sorted(neg)
    X = pair_features(current, pairs, landmarks)
    y = np.array([1.0] * len(pos) + [0.0] * len(neg))
    return X, y


def bce_loss_and_grad(model: ToyModel, X: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    p = np.clip(model.predict(X), 1e-12, 1 - 1e-12)
    loss = float(-np.mean(y * np.log(p) + (1 - y) * np.log(1 - p)))
    grad = X.T @ (p - y) / len(y)
    return loss, grad


def meta_update(model: ToyModel, grad, eta: float, r: float) -> ToyModel:
    """``w - eta * r * grad``."""
    if not eta > 0:
        raise ValidationError(f"eta must be positive, got {eta}")
    grad = np.asarray(grad, dtype=float)
    if not np.all(np.isfinite(grad)):
        raise ValidationError("gradient contains non-finite values")
    return ToyModel(model.weights - eta * r * grad)


class MetaStep(NamedTuple):
    t: int
    r: float
    loss: float
    phase: str


def run_meta_schedule(
    snapshots: Sequence[Snapshot],
    rates: Mapping[int, float],
    eta: float = 0.1,
    schedule: str = "live",
    landmarks: Mapping[int, frozenset[int]] | None = None,
    train_fraction: float = 0.7,
    seed: int = 0,
    model: ToyModel | None = None,
) -> tuple[ToyModel, list[MetaStep]]:
    """Drive the toy model across snapshot transitions ``t -> t+1``.

    ``live`` updates after every transition. ``window`` updates on the first
    ``train_fraction`` of transitions and only evaluates the rest. A transition
    without a rate in ``rates`` uses r = 1.
    """
    if schedule not in ("live", "window"):
        raise ValidationError(f"schedule must be 'live' or 'window', got {schedule!r}")
    model = model or ToyModel.zeros()
    landmarks = landmarks or {}
    n_train = int(round(train_fraction * (len(snapshots) - 1), 9))
    log = []
    for step, (cur, nxt) in enumerate(zip(snapshots, snapshots[1:])):
        X, y = link_task(cur, nxt, landmarks.get(cur.index, frozenset()), seed)
        if len(y) == 0:
            continue
        r = float(rates.get(cur.index, 1.0))
        loss, grad = bce_loss_and_grad(model, X, y)
        train = schedule == "live" or step < n_train
        if train:
            model = meta_update(model, grad, eta, r)
        log.append(MetaStep(cur.index, r, loss, "train" if train else "eval"))
    return model, log

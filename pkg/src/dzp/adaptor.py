"""Topological learning-rate adaptor: a one-block residual CNN mapping ZPI
differences to a scalar rate ``r`` in (0, 2).

    a1 = conv1(x);  h1 = relu(a1)
    s  = conv2(h1) + proj(x);  h2 = relu(s)
    p  = mean_{hw}(h2);  z = dense(p);  r = 2 * sigmoid(z)

Convolutions are 3x3 with zero "same" padding; ``proj`` is a 1x1 convolution
and is dropped when the input already has ``hidden`` channels. The dense layer
starts at zero so a fresh network returns r = 1 for every input.

Forward and backward passes are plain numpy.
"""
from __future__ import annotations

import csv
from collections.abc import Sequence
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import ParseError, ValidationError

HIDDEN = 4
# representable bounds strictly inside (0, 2); tanh saturates for |z| > ~19
R_MIN = float(np.finfo(float).tiny)
R_MAX = float(np.nextafter(2.0, 0.0))


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def conv3x3(x: np.ndarray, w: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Same-padded 3x3 cross-correlation. Returns output and the im2col matrix."""
    N, C, H, W = x.shape
    xp = np.pad(x, ((0, 0), (0, 0), (1, 1), (1, 1)))
    view = sliding_window_view(xp, (3, 3), axis=(2, 3))  # N, C, H, W, 3, 3
    cols = np.ascontiguousarray(view.transpose(0, 2, 3, 1, 4, 5)).reshape(N * H * W, C * 9)
    out = cols @ w.reshape(w.shape[0], -1).T
    return out.reshape(N, H, W, -1).transpose(0, 3, 1, 2) + b[None, :, None, None], cols


def conv3x3_backward(dout: np.ndarray, cols: np.ndarray, w: np.ndarray, need_dx: bool = True):
    N, O, H, W = dout.shape
    C = w.shape[1]
    d2 = dout.transpose(0, 2, 3, 1).reshape(N * H * W, O)
    dw = (d2.T @ cols).reshape(w.shape)
    db = d2.sum(axis=0)
    if not need_dx:
        return dw, db, None
    # scatter the patch gradients back, channels-last for contiguous slices
    dcols = (d2 @ w.reshape(O, -1)).reshape(N, H, W, C, 9)
    dxp = np.zeros((N, H + 2, W + 2, C))
    for k in range(9):
        i, j = divmod(k, 3)
        dxp[:, i:i + H, j:j + W, :] += dcols[..., k]
    return dw, db, dxp[:, 1:-1, 1:-1, :].transpose(0, 3, 1, 2)


@dataclass(frozen=True, eq=False)
class AdaptorNetwork:
    params: dict[str, np.ndarray]
    in_channels: int
    size: int
    hidden: int = HIDDEN

    @property
    def has_projection(self) -> bool:
        return self.in_channels != self.hidden

    @classmethod
    def initialize(cls, in_channels: int, size: int = 50, hidden: int = HIDDEN, seed: int = 0) -> "AdaptorNetwork":
        """He-normal convolutions, zero biases, zero dense layer (so r = 1)."""
        if in_channels < 1 or size < 1 or hidden < 1:
            raise ValidationError("in_channels, size and hidden must be positive")
        rng = np.random.default_rng(seed)
        p = {
            "conv1.weight": rng.normal(0.0, np.sqrt(2.0 / (9 * in_channels)), (hidden, in_channels, 3, 3)),
            "conv1.bias": np.zeros(hidden),
            "conv2.weight": rng.normal(0.0, np.sqrt(2.0 / (9 * hidden)), (hidden, hidden, 3, 3)),
            "conv2.bias": np.zeros(hidden),
        }
        if in_channels != hidden:
            p["proj.weight"] = rng.normal(0.0, np.sqrt(2.0 / in_channels), (hidden, in_channels))
            p["proj.bias"] = np.zeros(hidden)
        p["dense.weight"] = np.zeros(hidden)
        p["dense.bias"] = np.zeros(1)
        return cls(p, in_channels, size, hidden)

    def replace(self, params: dict[str, np.ndarray]) -> "AdaptorNetwork":
        if params.keys() != self.params.keys():
            raise ValidationError("parameter names do not match the network")
        for k, v in params.items():
            if np.shape(v) != self.params[k].shape:
                raise ValidationError(f"{k}: shape {np.shape(v)} != {self.params[k].shape}")
        return AdaptorNetwork({k: np.array(v, dtype=float) for k, v in params.items()}, self.in_channels, self.size, self.hidden)

    # -- passes -----------------------------------------------------------

    def _batch(self, x) -> tuple[np.ndarray, bool]:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 3
        if single:
            x = x[None]
        if x.ndim != 4 or x.shape[1:] != (self.in_channels, self.size, self.size):
            raise ValidationError(
                f"expected input of shape (N, {self.in_channels}, {self.size}, {self.size}), got {x.shape}"
            )
        return x, single

    def _forward(self, x: np.ndarray):
        p = self.params
        a1, cols1 = conv3x3(x, p["conv1.weight"], p["conv1.bias"])
        h1 = np.maximum(a1, 0.0)
        a2, cols2 = conv3x3(h1, p["conv2.weight"], p["conv2.bias"])
        if self.has_projection:
            skip = np.einsum("nchw,oc->nohw", x, p["proj.weight"]) + p["proj.bias"][None, :, None, None]
        else:
            skip = x
        s = a2 + skip
        h2 = np.maximum(s, 0.0)
        pooled = h2.mean(axis=(2, 3))
        z = pooled @ p["dense.weight"] + p["dense.bias"][0]
        r = np.clip(2.0 * _sigmoid(z), R_MIN, R_MAX)
        return r, (x, a1, cols1, cols2, s, pooled, z)

    def forward(self, x) -> np.ndarray | float:
        xb, single = self._batch(x)
        r, _ = self._forward(xb)
        return float(r[0]) if single else r

    def gradients(self, x, upstream) -> dict[str, np.ndarray]:
        """Gradient of ``sum_n upstream[n] * r[n]`` with respect to every parameter."""
        xb, _ = self._batch(x)
        r, cache = self._forward(xb)
        return self._backward(r, cache, upstream)

    def _backward(self, r, cache, upstream) -> dict[str, np.ndarray]:
        x, a1, cols1, cols2, s, pooled, z = cache
        g = np.broadcast_to(np.asarray(upstream, dtype=float), r.shape)
        p = self.params
        sig = r / 2.0
        dz = g * 2.0 * sig * (1.0 - sig)
        grads = {
            "dense.weight": pooled.T @ dz,
            "dense.bias": np.array([dz.sum()]),
        }
        hw = s.shape[2] * s.shape[3]
        dh2 = np.broadcast_to((dz[:, None] * p["dense.weight"][None, :] / hw)[:, :, None, None], s.shape)
        ds = dh2 * (s > 0)
        dw2, db2, dh1 = conv3x3_backward(ds, cols2, p["conv2.weight"])
        da1 = dh1 * (a1 > 0)
        dw1, db1, _ = conv3x3_backward(da1, cols1, p["conv1.weight"], need_dx=False)
        grads.update({"conv1.weight": dw1, "conv1.bias": db1, "conv2.weight": dw2, "conv2.bias": db2})
        if self.has_projection:
            grads["proj.weight"] = np.einsum("nohw,nchw->oc", ds, x)
            grads["proj.bias"] = ds.sum(axis=(0, 2, 3))
        return {k: grads[k] for k in p}


def adaptor_forward(net: AdaptorNetwork, delta) -> float:
    return net.forward(stack_deltas(delta))


def adaptor_gradients(net: AdaptorNetwork, delta, upstream: float = 1.0) -> dict[str, np.ndarray]:
    return net.gradients(stack_deltas(delta), upstream)


def stack_deltas(delta) -> np.ndarray:
    """Accept an array (C, H, W) / (N, C, H, W) or a sequence of delta images."""
    if isinstance(delta, np.ndarray):
        return delta
    if isinstance(delta, Sequence) and delta and hasattr(delta[0], "pixels"):
        return np.stack([d.pixels for d in delta])
    return np.asarray(delta, dtype=float)


def train_adaptor_step(net: AdaptorNetwork, batch, lr: float) -> tuple[AdaptorNetwork, float]:
    """One gradient step on mean squared error between ``r`` and the targets.

    Returns the updated network and the loss *before* the step.
    """
    if not lr > 0:
        raise ValidationError("lr must be positive")
    batch = list(batch)
    if not batch:
        raise ValidationError("empty batch")
    x, _ = net._batch(np.stack([stack_deltas(b[0]) for b in batch]))
    target = np.array([float(b[1]) for b in batch])
    r, cache = net._forward(x)
    resid = r - target
    loss = float(np.mean(resid**2))
    grads = net._backward(r, cache, 2.0 * resid / len(batch))
    return net.replace({k: v - lr * grads[k] for k, v in net.params.items()}), loss


def synthetic_task(n: int = 16, in_channels: int = 2, size: int = 50, seed: int = 0):
    """Random signed images whose target is their mean absolute pixel value,
    clipped to [0.05, 0.95] and doubled into (0, 2)."""
    rng = np.random.default_rng(seed)
    amp = rng.uniform(0.0, 1.2, n)
    xs = amp[:, None, None, None] * rng.standard_normal((n, in_channels, size, size))
    target = 2.0 * np.clip(np.abs(xs).mean(axis=(1, 2, 3)), 0.05, 0.95)
    return list(zip(xs, target))


def save_params(net: AdaptorNetwork, path: str | Path) -> None:
    """Flat CSV: ``name,shape,values...`` with shape written as ``AxBxC``."""
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["#meta", f"in_channels={net.in_channels}", f"size={net.size}", f"hidden={net.hidden}"])
        for name, arr in net.params.items():
            w.writerow([name, "x".join(str(d) for d in arr.shape)] + [repr(float(v)) for v in arr.ravel()])


def load_params(path: str | Path) -> AdaptorNetwork:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows or rows[0][0] != "#meta":
        raise ParseError(f"{path}: missing #meta row", line=1)
    meta = dict(item.split("=", 1) for item in rows[0][1:])
    params = {}
    for lineno, row in enumerate(rows[1:], start=2):
        try:
            shape = tuple(int(d) for d in row[1].split("x"))
            params[row[0]] = np.array([float(v) for v in row[2:]]).reshape(shape)
        except (IndexError, ValueError) as exc:
            raise ParseError(f"bad parameter row: {exc}", line=lineno) from None
    net = AdaptorNetwork.initialize(int(meta["in_channels"]), int(meta["size"]), int(meta["hidden"]))
    return net.replace(params)

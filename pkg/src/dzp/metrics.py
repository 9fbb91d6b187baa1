"""Bottleneck distance between persistence diagrams."""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .zigzag import PersistenceDiagram

Point = tuple[float, float]


def _perfect_matching_exists(allowed: np.ndarray) -> bool:
    n = allowed.shape[0]
    if n == 0:
        return True
    match = maximum_bipartite_matching(csr_matrix(allowed.astype(np.int8)), perm_type="column")
    return bool(np.all(match >= 0))


def bottleneck_points(a: Sequence[Point] | np.ndarray, b: Sequence[Point] | np.ndarray) -> float:
    """l-inf bottleneck distance; unmatched points go to the diagonal at half their persistence.

    Exact: binary search over the finite set of candidate costs, with a
    perfect-matching test on the augmented bipartite graph at each threshold.
    """
    A = np.asarray(a, dtype=float).reshape(-1, 2)
    B = np.asarray(b, dtype=float).reshape(-1, 2)
    m, n = len(A), len(B)
    if m == 0 and n == 0:
        return 0.0
    diag_a = (A[:, 1] - A[:, 0]) / 2
    diag_b = (B[:, 1] - B[:, 0]) / 2
    pair = np.max(np.abs(A[:, None, :] - B[None, :, :]), axis=2) if m and n else np.zeros((m, n))

    # rows: A points then n diagonal slots; columns: B points then m diagonal slots
    size = m + n
    cost = np.full((size, size), np.inf)
    cost[:m, :n] = pair
    for i in range(m):
        cost[i, n + i] = diag_a[i]
    for j in range(n):
        cost[m + j, j] = diag_b[j]
    cost[m:, n:] = 0.0

    candidates = np.unique(cost[np.isfinite(cost)])
    lo, hi = 0, len(candidates) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _perfect_matching_exists(cost <= candidates[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(candidates[lo])


def bottleneck_distance(
    a: PersistenceDiagram, b: PersistenceDiagram, dim: int | None = None
) -> float:
    """Distance in one dimension, or the max over all dimensions when ``dim`` is None."""
    if dim is not None:
        return bottleneck_points(a.points(dim), b.points(dim))
    dims = set(a.dims) | set(b.dims)
    return max((bottleneck_points(a.points(k), b.points(k)) for k in dims), default=0.0)


def bottleneck_by_dim(a: PersistenceDiagram, b: PersistenceDiagram, dims: Sequence[int]) -> dict[int, float]:
    return {k: bottleneck_points(a.points(k), b.points(k)) for k in dims}

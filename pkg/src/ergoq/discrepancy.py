"""Discrepancy of point sets: how far an empirical distribution strays from uniform.

The star variant measures anchored boxes [0, t); the extreme variant allows
arbitrary intervals [a, b).  One-dimensional values are exact via the
sorted-order formulas; two dimensions fall back to an exact sweep over the
grid of candidate box corners, and higher dimensions are rejected.
"""

from __future__ import annotations

import math
from typing import NamedTuple, Sequence

import numpy as np

from .qrseq import GeneratorSpec, point_block

__all__ = [
    "TrendRow",
    "discrepancy_trend",
    "extreme_discrepancy_1d",
    "midpoint_set",
    "star_discrepancy_1d",
    "star_discrepancy_2d",
]


def _checked_1d(points: Sequence[float]) -> np.ndarray:
    xs = np.asarray(points, dtype=float)
    if xs.ndim != 1 or xs.size == 0:
        raise ValueError("expected a non-empty 1-D point list")
    if np.any(xs < 0.0) or np.any(xs >= 1.0):
        raise ValueError("points must lie in [0, 1)")
    return np.sort(xs)


def star_discrepancy_1d(points: Sequence[float]) -> float:
    """Exact star discrepancy sup_t |#{x_i < t}/n - t| over t in (0, 1].

    Uses the sorted-order formula D* = max_i max(x_(i) - (i-1)/n, i/n - x_(i)).
    """
    xs = _checked_1d(points)
    n = xs.size
    i = np.arange(1, n + 1)
    return float(np.maximum(xs - (i - 1) / n, i / n - xs).max())


def extreme_discrepancy_1d(points: Sequence[float]) -> float:
    """Exact extreme discrepancy: sup over intervals [a, b) of |count/n - (b-a)|.

    Sorted-order formula: 1/n + max_i(i/n - x_(i)) - min_i(i/n - x_(i)).
    The evenly spread midpoint set (1/2n, 3/2n, ..., (2n-1)/2n) attains the
    minimum possible value 1/n.
    """
    xs = _checked_1d(points)
    n = xs.size
    diffs = np.arange(1, n + 1) / n - xs
    return float(1.0 / n + diffs.max() - diffs.min())


def star_discrepancy_2d(points: np.ndarray) -> float:
    """Exact 2-D star discrepancy by sweeping the corner grid.

    Candidate boxes [0,u) x [0,v) only need u, v drawn from the point
    coordinates and 1.0; open counts bound the volume excess from below the
    corner, closed counts from above.  O(n^2) memory, so meant for the
    sample sizes the trend diagnostics use.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] == 0:
        raise ValueError("expected a non-empty (n, 2) point array")
    if np.any(pts < 0.0) or np.any(pts >= 1.0):
        raise ValueError("points must lie in [0, 1)^2")
    n = pts.shape[0]
    us = np.unique(np.append(pts[:, 0], 1.0))
    vs = np.unique(np.append(pts[:, 1], 1.0))

    # open_cnt[a, b] = #{p : p.x < us[a] and p.y < vs[b]}; closed_cnt uses <=
    open_hits = np.zeros((us.size + 1, vs.size + 1), dtype=np.int64)
    closed_hits = np.zeros_like(open_hits)
    ox = np.searchsorted(us, pts[:, 0], side="right")
    oy = np.searchsorted(vs, pts[:, 1], side="right")
    cx = np.searchsorted(us, pts[:, 0], side="left")
    cy = np.searchsorted(vs, pts[:, 1], side="left")
    np.add.at(open_hits, (ox, oy), 1)
    np.add.at(closed_hits, (cx, cy), 1)
    open_cnt = open_hits.cumsum(axis=0).cumsum(axis=1)[:-1, :-1]
    closed_cnt = closed_hits.cumsum(axis=0).cumsum(axis=1)[:-1, :-1]

    vol = us[:, None] * vs[None, :]
    gap = np.maximum(vol - open_cnt / n, closed_cnt / n - vol)
    return float(gap.max())


def midpoint_set(n: int) -> np.ndarray:
    """The n-term midpoint sequence (1/2n, 3/2n, ..., (2n-1)/2n)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return (2.0 * np.arange(n) + 1.0) / (2.0 * n)


class TrendRow(NamedTuple):
    n: int
    d_star: float
    normalized: float  # n * D* / (1 + log n), the constant in the decay bound


def _star_any(points: np.ndarray) -> float:
    if points.shape[1] == 1:
        return star_discrepancy_1d(points[:, 0])
    return star_discrepancy_2d(points)


def discrepancy_trend(spec: GeneratorSpec, ns: Sequence[int]) -> list[TrendRow]:
    """Star discrepancy of the first n points for each n, with the
    normalization n*D*/(1 + log n) that should stay bounded for Kronecker
    sequences.

    Exact in 1-D; 2-D uses the corner-grid sweep; higher dimensions are
    rejected.  Points are taken starting at the spec's skip.
    """
    if spec.dim > 2:
        raise ValueError(f"discrepancy supports dim <= 2, got {spec.dim}")
    rows = []
    start = spec.skip or 0
    for n in ns:
        if n < 1:
            raise ValueError("sample sizes must be >= 1")
        pts = point_block(spec, start, n)
        d = _star_any(pts)
        rows.append(TrendRow(n=n, d_star=d, normalized=n * d / (1.0 + math.log(n))))
    return rows

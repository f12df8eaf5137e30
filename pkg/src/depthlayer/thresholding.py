"""Threshold estimation from the consecutive-pixel difference histogram."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from .core import DepthMap, DepthMapError

Axis = Literal["rows", "columns"]

METHODS = ("percentile", "paper-mode")
DEFAULT_METHOD = "percentile"
DEFAULT_PERCENTILE = 0.75
MAX_SAMPLE_LINES = 64


@dataclass(frozen=True)
class DifferenceHistogram:
    counts: dict[int, int]
    total: int
    axis: str
    max_level: int

    def argmax(self) -> int:
        """Most frequent difference value, smallest on ties."""
        best = max(self.counts.values())
        return min(d for d, c in self.counts.items() if c == best)

    def percentile(self, p: float) -> int:
        """Lower ``p``-quantile of the pooled differences.

        Same rank rule as ``numpy.quantile(..., method="lower")``: the value
        at sorted position ``floor(p * (total - 1))``.
        """
        rank = math.floor(p * (self.total - 1))
        running = 0
        for d in sorted(self.counts):
            running += self.counts[d]
            if running > rank:
                return d
        return max(self.counts)


@dataclass(frozen=True)
class ThresholdEstimate:
    row_threshold: int
    column_threshold: int
    method: str
    sampled_lines: int


def _lines(depth: DepthMap, axis: str) -> np.ndarray:
    if axis == "rows":
        return depth.values
    if axis == "columns":
        return depth.values.T
    raise ValueError(f"axis must be 'rows' or 'columns', got {axis!r}")


def difference_histogram(
    depth: DepthMap, line_indices: Sequence[int], axis: Axis = "rows"
) -> DifferenceHistogram:
    """Count ``|D(p) - D(q)|`` over adjacent pairs along the selected lines."""
    lines = _lines(depth, axis)
    idx = np.asarray(list(line_indices), dtype=np.int64)
    if idx.size == 0:
        raise ValueError("line_indices is empty; nothing to estimate")
    if lines.shape[1] < 2:
        raise DepthMapError(f"lines along {axis} have length 1; no adjacent pairs")
    if idx.min() < 0 or idx.max() >= lines.shape[0]:
        raise DepthMapError(
            f"line index out of range 0..{lines.shape[0] - 1} for axis {axis}"
        )
    diffs = np.abs(np.diff(lines[idx], axis=1)).reshape(-1)
    binned = np.bincount(diffs)
    nz = np.flatnonzero(binned)
    counts = {int(d): int(binned[d]) for d in nz}
    return DifferenceHistogram(
        counts=counts, total=int(diffs.size), axis=axis, max_level=depth.max_level
    )


def _sample(n_lines: int, sample_count: int | None, rng: np.random.Generator) -> np.ndarray:
    k = min(n_lines, MAX_SAMPLE_LINES) if sample_count is None else min(n_lines, sample_count)
    return np.sort(rng.choice(n_lines, size=k, replace=False))


def _estimate_axis(
    depth: DepthMap, axis: str, idx: np.ndarray, method: str, percentile: float
) -> int:
    if method == "percentile":
        value = difference_histogram(depth, idx, axis).percentile(percentile)
    else:
        value = max(difference_histogram(depth, [i], axis).argmax() for i in idx)
    return max(1, int(value))


def estimate_threshold(
    depth: DepthMap,
    method: str = DEFAULT_METHOD,
    percentile: float = DEFAULT_PERCENTILE,
    sample_count: int | None = None,
    seed: int = 0,
) -> ThresholdEstimate:
    """Estimate the row (``T_r``) and column (``T_c``) cut thresholds.

    ``sample_count`` lines are drawn without replacement per axis (default
    ``min(n, 64)``). ``"percentile"`` returns the cumulative cut of the pooled
    histogram; ``"paper-mode"`` returns the largest per-line peak difference.
    Both results are clamped to at least 1. An axis with fewer than two
    pixels per line borrows the estimate of the other axis.
    """
    if method not in METHODS:
        raise ValueError(f"unknown estimator {method!r}; expected one of {METHODS}")
    if not 0.0 < percentile <= 1.0:
        raise ValueError(f"percentile must be in (0, 1], got {percentile}")
    if sample_count is not None and sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    if depth.width < 2 and depth.height < 2:
        raise DepthMapError("1x1 depth map has no adjacent pixel pairs")

    rng = np.random.default_rng(seed)
    row_idx = _sample(depth.height, sample_count, rng)
    col_idx = _sample(depth.width, sample_count, rng)

    t_r = t_c = None
    if depth.width >= 2:
        t_r = _estimate_axis(depth, "rows", row_idx, method, percentile)
    if depth.height >= 2:
        t_c = _estimate_axis(depth, "columns", col_idx, method, percentile)
    if t_r is None:
        t_r = t_c
    if t_c is None:
        t_c = t_r
    return ThresholdEstimate(
        row_threshold=t_r,
        column_threshold=t_c,
        method=method,
        sampled_lines=int(row_idx.size + col_idx.size),
    )

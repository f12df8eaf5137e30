"""Brute-force reference partitions for checking the layering pipeline.

Deliberately naive (pixelwise flood fill) and independent of the
row-segment machinery. Only meaningful on piecewise-constant maps whose
steps exceed the connectivity value.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .core import DepthMap, dense_relabel


@dataclass(frozen=True)
class PixelPartition:
    width: int
    height: int
    class_of: np.ndarray  # (height, width), ids 1..class_count
    class_count: int

    @classmethod
    def from_labels(cls, labels) -> "PixelPartition":
        arr = np.asarray(labels)
        if arr.ndim != 2:
            raise ValueError("labels must be 2D")
        dense = dense_relabel(arr)
        return cls(width=arr.shape[1], height=arr.shape[0], class_of=dense,
                   class_count=int(dense.max()))


def oracle_objects(depth: DepthMap, connectivity: int) -> PixelPartition:
    """4-connected components under ``|D(p) - D(q)| <= connectivity``."""
    h, w = depth.height, depth.width
    d = depth.values.tolist()
    cls = [[0] * w for _ in range(h)]
    n = 0
    for y0 in range(h):
        for x0 in range(w):
            if cls[y0][x0]:
                continue
            n += 1
            cls[y0][x0] = n
            queue = deque([(y0, x0)])
            while queue:
                y, x = queue.popleft()
                v = d[y][x]
                for ny, nx in ((y - 1, x), (y + 1, x), (y, x - 1), (y, x + 1)):
                    if 0 <= ny < h and 0 <= nx < w and not cls[ny][nx] \
                            and abs(d[ny][nx] - v) <= connectivity:
                        cls[ny][nx] = n
                        queue.append((ny, nx))
    return PixelPartition(width=w, height=h, class_of=np.array(cls, dtype=np.int64),
                          class_count=n)


def oracle_object_layers(depth: DepthMap, connectivity: int) -> PixelPartition:
    """Group flood-fill components that share a depth value.

    Layers are the exact distinct values; a component touching several
    values (possible when ``connectivity`` bridges a step) pulls those
    values together as well.
    """
    comps = oracle_objects(depth, connectivity)
    parent = list(range(comps.class_count + 1))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    owner: dict[int, int] = {}
    for c, v in zip(comps.class_of.reshape(-1).tolist(), depth.values.reshape(-1).tolist()):
        if v in owner:
            ra, rb = find(owner[v]), find(c)
            if ra != rb:
                parent[rb] = ra
        else:
            owner[v] = c
    roots = np.array([find(c) for c in range(comps.class_count + 1)])
    return PixelPartition.from_labels(roots[comps.class_of])


@dataclass(frozen=True)
class PartitionComparison:
    equivalent: bool
    mismatched_pixel_pairs: int


def _pairs(counts: np.ndarray) -> int:
    counts = counts.astype(np.int64)
    return int((counts * (counts - 1) // 2).sum())


def compare_partitions(a, b) -> PartitionComparison:
    """Relabel-invariant comparison of two partitions of the same grid.

    ``mismatched_pixel_pairs`` counts unordered pixel pairs that are together
    in one partition and apart in the other.
    """
    la = np.asarray(a.class_of if isinstance(a, PixelPartition) else a)
    lb = np.asarray(b.class_of if isinstance(b, PixelPartition) else b)
    if la.shape != lb.shape:
        raise ValueError(f"dimension mismatch: {la.shape} vs {lb.shape}")
    la = la.reshape(-1).astype(np.int64)
    lb = lb.reshape(-1).astype(np.int64)
    _, ia = np.unique(la, return_inverse=True)
    _, ib = np.unique(lb, return_inverse=True)
    joint = ia * (int(ib.max()) + 1) + ib
    same_a = _pairs(np.bincount(ia))
    same_b = _pairs(np.bincount(ib))
    same_both = _pairs(np.unique(joint, return_counts=True)[1])
    mismatched = same_a + same_b - 2 * same_both
    return PartitionComparison(equivalent=mismatched == 0, mismatched_pixel_pairs=mismatched)

"""Domain types shared by every stage of the layering pipeline."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

import numpy as np
from scipy.cluster.hierarchy import DisjointSet as _ScipyDisjointSet


class DepthMapError(ValueError):
    """Raised when a depth map or an index into it is invalid."""


class ConsistencyError(RuntimeError):
    """Raised when pipeline stages receive inputs that do not belong together."""


@dataclass(frozen=True, eq=False)
class DepthMap:
    """A 2D grid of integer depth gray levels in ``0..max_level``.

    ``values`` is a read-only ``(height, width)`` integer array. Use
    :func:`make_depth_map` to build one from a flat row-major sequence.
    """

    width: int
    height: int
    max_level: int
    values: np.ndarray

    def row(self, i: int) -> np.ndarray:
        if not 0 <= i < self.height:
            raise DepthMapError(f"row {i} out of range 0..{self.height - 1}")
        return self.values[i]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.height, self.width)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DepthMap):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.max_level == other.max_level
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]


def make_depth_map(width: int, height: int, max_level: int, values) -> DepthMap:
    """Validate dimensions and levels and return an immutable :class:`DepthMap`."""
    if width < 1 or height < 1:
        raise DepthMapError(f"dimensions must be >= 1, got {width}x{height}")
    if max_level < 1:
        raise DepthMapError(f"max_level must be >= 1, got {max_level}")
    arr = np.asarray(values)
    if arr.size != width * height:
        raise DepthMapError(
            f"values length {arr.size} != width*height = {width * height}"
        )
    flat = arr.reshape(-1)
    if flat.dtype.kind == "f":
        bad = np.flatnonzero(flat != np.round(flat))
        if bad.size:
            raise DepthMapError(f"non-integer depth {flat[bad[0]]} at index {bad[0]}")
    elif flat.dtype.kind not in "iub":
        raise DepthMapError(f"unsupported value dtype {flat.dtype}")
    flat = flat.astype(np.int64)
    bad = np.flatnonzero((flat < 0) | (flat > max_level))
    if bad.size:
        i = int(bad[0])
        raise DepthMapError(
            f"value {flat[i]} at index {i} outside 0..{max_level}"
        )
    grid = flat.reshape(height, width).copy()
    grid.setflags(write=False)
    return DepthMap(width=width, height=height, max_level=max_level, values=grid)


@dataclass(frozen=True)
class LineSegment:
    """A maximal horizontal run ``start..end`` (inclusive) within one row."""

    row: int
    start: int
    end: int
    value: int
    object_number: int | None = None
    layer_number: int | None = None

    @property
    def length(self) -> int:
        return self.end - self.start + 1


@dataclass
class LayerTable:
    """Ordered registry of layers; ``entries[k - 1]`` is ``(k, V_k)``."""

    tolerance: int = 0
    entries: list[tuple[int, int]] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def values(self) -> list[int]:
        return [v for _, v in self.entries]

    def value_of(self, layer_id: int) -> int:
        return self.entries[layer_id - 1][1]

    def register(self, value: int) -> int:
        layer_id = len(self.entries) + 1
        self.entries.append((layer_id, int(value)))
        return layer_id


class DisjointSet:
    """Union-find over hashable ids (backed by scipy's implementation)."""

    def __init__(self, ids: Iterable[Hashable] = ()):
        self._ds = _ScipyDisjointSet(ids)

    def add(self, x: Hashable) -> None:
        self._ds.add(x)

    def find(self, x: Hashable) -> Hashable:
        return self._ds[x]

    def union(self, a: Hashable, b: Hashable) -> bool:
        """Merge the sets of ``a`` and ``b``; return False if already joined."""
        return self._ds.merge(a, b)

    def connected(self, a: Hashable, b: Hashable) -> bool:
        return self._ds.connected(a, b)

    def __contains__(self, x: Hashable) -> bool:
        return x in self._ds

    def __len__(self) -> int:
        return self._ds.n_subsets

    @property
    def n_roots(self) -> int:
        return self._ds.n_subsets

    def subsets(self) -> list[set]:
        return self._ds.subsets()


def _mode(values: np.ndarray) -> int:
    # most frequent value; ties go to the smallest
    lo = values.min()
    if lo == values.max():
        return int(lo)
    uniq, counts = np.unique(values, return_counts=True)
    return int(uniq[np.argmax(counts)])


def mode_of_run(depth: DepthMap, row: int, start: int, end: int) -> int:
    """Most frequent depth in ``depth[row, start:end + 1]``, smallest on ties."""
    values = depth.row(row)
    if not 0 <= start <= end < depth.width:
        raise DepthMapError(
            f"run {start}..{end} invalid for width {depth.width}"
        )
    return _mode(values[start : end + 1])


def mode_of_counts(counts: dict[int, int]) -> int:
    """Mode of a value -> count mapping, smallest value on ties."""
    best = max(counts.values())
    return min(v for v, c in counts.items() if c == best)


def dense_relabel(labels: Sequence[int] | np.ndarray) -> np.ndarray:
    """Relabel to 1..N in order of first appearance (row-major)."""
    arr = np.asarray(labels)
    _, first, inverse = np.unique(arr.reshape(-1), return_index=True, return_inverse=True)
    order = np.argsort(first, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(1, order.size + 1)
    return rank[inverse].reshape(arr.shape)

"""Object numbers (vertical connectivity) and layer numbers (depth matching)."""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .core import ConsistencyError, DepthMap, DisjointSet, LayerTable, LineSegment
from .segmentation import RowSegments


@dataclass(frozen=True)
class LabeledSegments(RowSegments):
    """Row segments carrying object and/or layer numbers.

    ``object_count`` is the number of canonical objects after merging;
    ``raw_object_count`` is how many fresh numbers the row scan handed out.
    """

    object_count: int | None = None
    raw_object_count: int | None = None
    object_merges: DisjointSet | None = None
    layer_table: LayerTable | None = None


def _as_labeled(segments: RowSegments) -> LabeledSegments:
    if isinstance(segments, LabeledSegments):
        return segments
    return LabeledSegments(
        rows=segments.rows, threshold_used=segments.threshold_used, width=segments.width
    )


def assign_object_numbers(
    segments: RowSegments, depth: DepthMap | None, connectivity: int
) -> LabeledSegments:
    """Label segments so vertically overlapping runs with close depth share a number.

    A segment inherits the number of the first overlapping segment in the row
    above whose value is within ``connectivity``; every further match is
    unioned in, so objects joined from below (a U shape) end up with one
    number. Numbers are then renumbered densely in row-major order.
    """
    if connectivity < 0:
        raise ValueError(f"connectivity must be >= 0, got {connectivity}")
    if depth is not None and (depth.width, depth.height) != (segments.width, segments.height):
        raise ConsistencyError("segments and depth map have different dimensions")

    merges = DisjointSet()
    counter = 0
    raw: list[list[int]] = []
    prev: list[LineSegment] = []
    prev_on: list[int] = []
    for row in segments.rows:
        row_on = []
        k0 = 0
        for seg in row:
            # advance the lower bound past segments that end left of this one
            while k0 < len(prev) and prev[k0].end < seg.start:
                k0 += 1
            on = None
            k = k0
            while k < len(prev) and prev[k].start <= seg.end:
                if abs(seg.value - prev[k].value) <= connectivity:
                    if on is None:
                        on = prev_on[k]
                    else:
                        merges.union(on, prev_on[k])
                k += 1
            if on is None:
                counter += 1
                on = counter
                merges.add(on)
            row_on.append(on)
        raw.append(row_on)
        prev, prev_on = row, row_on

    dense: dict = {}
    rows = []
    for row, row_on in zip(segments.rows, raw):
        out = []
        for seg, on in zip(row, row_on):
            root = merges.find(on)
            if root not in dense:
                dense[root] = len(dense) + 1
            out.append(dataclasses.replace(seg, object_number=dense[root]))
        rows.append(out)

    base = _as_labeled(segments)
    return dataclasses.replace(
        base,
        rows=rows,
        object_count=len(dense),
        raw_object_count=counter,
        object_merges=merges,
    )


def assign_layer_numbers(segments: RowSegments, layer_tolerance: int = 0) -> LabeledSegments:
    """Give each segment the first layer whose value is within ``layer_tolerance``.

    Matching is against the stored layer value, so layers do not drift or
    chain. Unmatched segments open a new layer at their own value.
    """
    if layer_tolerance < 0:
        raise ValueError(f"layer_tolerance must be >= 0, got {layer_tolerance}")
    table = LayerTable(tolerance=layer_tolerance)
    first_layer: dict[int, int] = {}  # value -> lowest layer id with that value

    def lookup(v: int) -> int | None:
        if layer_tolerance == 0:
            return first_layer.get(v)
        if 2 * layer_tolerance + 1 <= len(table):
            hits = [first_layer[u] for u in range(v - layer_tolerance, v + layer_tolerance + 1)
                    if u in first_layer]
            return min(hits) if hits else None
        for k, vk in table.entries:
            if abs(v - vk) <= layer_tolerance:
                return k
        return None

    rows = []
    for row in segments.rows:
        out = []
        for seg in row:
            k = lookup(seg.value)
            if k is None:
                k = table.register(seg.value)
                first_layer.setdefault(seg.value, k)
            out.append(dataclasses.replace(seg, layer_number=k))
        rows.append(out)

    base = _as_labeled(segments)
    return dataclasses.replace(base, rows=rows, layer_table=table)

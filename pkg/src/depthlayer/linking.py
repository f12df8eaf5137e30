"""Link perception: compound objects, object-layers, depth ordering, label maps.

:func:`run_layering` strings every stage together.
"""
from __future__ import annotations

import dataclasses
import time
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .core import (
    ConsistencyError,
    DepthMap,
    DisjointSet,
    LayerTable,
    mode_of_counts,
)
from .labeling import LabeledSegments, assign_layer_numbers, assign_object_numbers
from .segmentation import segment_all_rows
from .thresholding import DEFAULT_METHOD, DEFAULT_PERCENTILE, ThresholdEstimate, estimate_threshold


@dataclass
class CompoundObject:
    object_number: int
    layer_numbers: set[int] = field(default_factory=set)
    pixel_count: int = 0
    value_histogram: Counter = field(default_factory=Counter)


@dataclass(frozen=True)
class ObjectLayer:
    id: int
    object_numbers: frozenset[int]
    layer_numbers: frozenset[int]
    representative_depth: int
    pixel_count: int
    depth_rank: int | None = None
    value_histogram: dict[int, int] = field(default_factory=dict, compare=False, repr=False)


@dataclass(frozen=True)
class LabelMap:
    width: int
    height: int
    labels: np.ndarray  # (height, width) uint16/int ids 1..m

    @property
    def count(self) -> int:
        return int(self.labels.max())


def build_compound_objects(labeled: LabeledSegments) -> list[CompoundObject]:
    """One compound object per object number, collecting the layers it touches.

    Depth statistics use each segment's cached value weighted by its length.
    """
    compounds: dict[int, CompoundObject] = {}
    for seg in labeled:
        if seg.object_number is None or seg.layer_number is None:
            raise ConsistencyError(f"segment {seg} lacks object or layer number")
        co = compounds.get(seg.object_number)
        if co is None:
            co = compounds[seg.object_number] = CompoundObject(seg.object_number)
        co.layer_numbers.add(seg.layer_number)
        co.pixel_count += seg.length
        co.value_histogram[seg.value] += seg.length
    return [compounds[k] for k in sorted(compounds)]


def link_object_layers(compounds: Sequence[CompoundObject]) -> list[ObjectLayer]:
    """Connected components of the object/layer incidence graph.

    Objects that share a layer end up together, and an object spanning
    several layers pulls those layers together. Result ids follow the
    smallest member object number; ranks are left unset.
    """
    if not compounds:
        raise ValueError("no compound objects to link")
    ds = DisjointSet()
    for co in compounds:
        node = ("o", co.object_number)
        ds.add(node)
        for ln in co.layer_numbers:
            ds.add(("l", ln))
            ds.union(node, ("l", ln))

    groups: dict = {}
    for co in compounds:
        groups.setdefault(ds.find(("o", co.object_number)), []).append(co)

    layers = []
    for members in groups.values():
        hist: Counter = Counter()
        for co in members:
            hist.update(co.value_histogram)
        layers.append(
            ObjectLayer(
                id=len(layers) + 1,
                object_numbers=frozenset(co.object_number for co in members),
                layer_numbers=frozenset().union(*(co.layer_numbers for co in members)),
                representative_depth=mode_of_counts(hist) if hist else 0,
                pixel_count=sum(co.pixel_count for co in members),
                value_histogram=dict(hist),
            )
        )
    return layers


def order_layers(object_layers: Iterable[ObjectLayer], far_is_low: bool = True) -> list[ObjectLayer]:
    """Sort farthest-first and renumber ids 1..m by rank."""
    sign = 1 if far_is_low else -1
    ranked = sorted(
        object_layers,
        key=lambda ol: (sign * ol.representative_depth, ol.representative_depth,
                        min(ol.object_numbers)),
    )
    return [
        dataclasses.replace(ol, id=rank, depth_rank=rank)
        for rank, ol in enumerate(ranked, start=1)
    ]


def render_label_map(
    depth: DepthMap, labeled: LabeledSegments, object_layers: Sequence[ObjectLayer]
) -> LabelMap:
    if (labeled.width, labeled.height) != (depth.width, depth.height):
        raise ConsistencyError("labeled segments do not match depth map dimensions")
    owner = {on: ol.id for ol in object_layers for on in ol.object_numbers}
    if max(owner.values(), default=0) > 65535:
        raise ConsistencyError("more than 65535 object-layers")
    labels = np.zeros((depth.height, depth.width), dtype=np.uint16)
    for seg in labeled:
        try:
            labels[seg.row, seg.start : seg.end + 1] = owner[seg.object_number]
        except KeyError:
            raise ConsistencyError(
                f"object {seg.object_number} belongs to no object-layer"
            ) from None
    if not labels.all():
        raise ConsistencyError("label map has unassigned pixels")
    labels.setflags(write=False)
    return LabelMap(width=depth.width, height=depth.height, labels=labels)


@dataclass
class LayeringResult:
    label_map: LabelMap
    object_layers: list[ObjectLayer]
    layer_table: LayerTable
    labeled: LabeledSegments
    threshold: int
    connectivity: int
    estimate: ThresholdEstimate | None
    diagnostics: dict


def run_layering(
    depth: DepthMap,
    threshold: int | None = None,
    connectivity: int | None = None,
    layer_tolerance: int = 0,
    far_is_low: bool = True,
    seed: int = 0,
    estimator: str = DEFAULT_METHOD,
    percentile: float = DEFAULT_PERCENTILE,
    sample_lines: int | None = None,
) -> LayeringResult:
    """Slice ``depth`` into depth-ordered object-layers.

    ``threshold`` cuts rows into segments and ``connectivity`` links them
    vertically; whichever is omitted comes from :func:`estimate_threshold`
    (row estimate for the cut, column estimate for connectivity).
    """
    t0 = time.perf_counter()
    estimate = None
    if threshold is None or connectivity is None:
        if depth.width == 1 and depth.height == 1:
            # no pixel pairs: every threshold gives the same result
            estimate = ThresholdEstimate(1, 1, estimator, 0)
        else:
            estimate = estimate_threshold(
                depth, method=estimator, percentile=percentile,
                sample_count=sample_lines, seed=seed,
            )
        if threshold is None:
            threshold = estimate.row_threshold
        if connectivity is None:
            connectivity = estimate.column_threshold
    t1 = time.perf_counter()

    segments = segment_all_rows(depth, threshold)
    t2 = time.perf_counter()
    labeled = assign_object_numbers(segments, depth, connectivity)
    labeled = assign_layer_numbers(labeled, layer_tolerance)
    t3 = time.perf_counter()

    compounds = build_compound_objects(labeled)
    object_layers = order_layers(link_object_layers(compounds), far_is_low)
    label_map = render_label_map(depth, labeled, object_layers)
    t4 = time.perf_counter()

    diagnostics = {
        "segment_count": len(labeled),
        "raw_object_count": labeled.raw_object_count,
        "object_count": labeled.object_count,
        "layer_count": len(labeled.layer_table),
        "object_layer_count": len(object_layers),
        "timing": {
            "estimate_s": t1 - t0,
            "segment_s": t2 - t1,
            "label_s": t3 - t2,
            "link_s": t4 - t3,
            "total_s": t4 - t0,
        },
    }
    return LayeringResult(
        label_map=label_map,
        object_layers=object_layers,
        layer_table=labeled.layer_table,
        labeled=labeled,
        threshold=int(threshold),
        connectivity=int(connectivity),
        estimate=estimate,
        diagnostics=diagnostics,
    )


def object_number_map(labeled: LabeledSegments) -> np.ndarray:
    """Per-pixel canonical object numbers (before linking)."""
    out = np.zeros((labeled.height, labeled.width), dtype=np.int64)
    for seg in labeled:
        out[seg.row, seg.start : seg.end + 1] = seg.object_number
    return out

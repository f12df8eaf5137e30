"""Depth-wise layering of depth images into depth-ordered object-layers."""
from .core import (
    ConsistencyError,
    DepthMap,
    DepthMapError,
    DisjointSet,
    LayerTable,
    LineSegment,
    make_depth_map,
    mode_of_run,
)
from .estimator import DepthLayering
from .labeling import LabeledSegments, assign_layer_numbers, assign_object_numbers
from .linking import (
    CompoundObject,
    LabelMap,
    LayeringResult,
    ObjectLayer,
    build_compound_objects,
    link_object_layers,
    order_layers,
    render_label_map,
    run_layering,
)
from .oracle import PixelPartition, compare_partitions, oracle_object_layers, oracle_objects
from .segmentation import RowSegments, segment_all_rows, segment_row
from .thresholding import DifferenceHistogram, ThresholdEstimate, difference_histogram, estimate_threshold
from .validation import check_depth_map

__version__ = "0.1.0"

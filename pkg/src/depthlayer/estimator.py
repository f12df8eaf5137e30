"""Scikit-learn style front end for depth-wise layering."""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin
from sklearn.utils.validation import check_is_fitted

from .linking import run_layering
from .thresholding import DEFAULT_METHOD, DEFAULT_PERCENTILE, METHODS
from .validation import check_depth_map, check_non_negative_int


class DepthLayering(ClusterMixin, BaseEstimator):
    """Slice a depth image into depth-ordered object-layers.

    Parameters
    ----------
    threshold : int or None
        Row cut threshold; estimated from the data when None.
    connectivity : int or None
        Largest depth difference linking vertically overlapping segments;
        defaults to the estimated column threshold.
    layer_tolerance : int
        Depth tolerance for matching a segment to an existing layer.
    estimator : {"percentile", "paper-mode"}
    percentile : float
        Cumulative fraction used by the percentile estimator.
    sample_lines : int or None
        Lines sampled per axis for estimation (default ``min(n, 64)``).
    far_is_low : bool
        Whether low gray values are far from the camera.
    seed : int
        Seed for line sampling.

    Attributes
    ----------
    labels_ : ndarray of shape (height, width)
        Object-layer id per pixel, 1 = farthest.
    object_layers_ : list of ObjectLayer
    layer_table_ : LayerTable
    threshold_, connectivity_ : int
        Thresholds actually used; :meth:`predict` reuses them.
    n_object_layers_, n_objects_, n_layers_ : int
    result_ : LayeringResult
    """

    def __init__(self, threshold=None, connectivity=None, layer_tolerance=0,
                 estimator=DEFAULT_METHOD, percentile=DEFAULT_PERCENTILE,
                 sample_lines=None, far_is_low=True, seed=0):
        self.threshold = threshold
        self.connectivity = connectivity
        self.layer_tolerance = layer_tolerance
        self.estimator = estimator
        self.percentile = percentile
        self.sample_lines = sample_lines
        self.far_is_low = far_is_low
        self.seed = seed

    def _check_params(self):
        check_non_negative_int(self.threshold, "threshold", allow_none=True)
        check_non_negative_int(self.connectivity, "connectivity", allow_none=True)
        check_non_negative_int(self.layer_tolerance, "layer_tolerance")
        if self.estimator not in METHODS:
            raise ValueError(f"estimator must be one of {METHODS}, got {self.estimator!r}")
        if not 0.0 < float(self.percentile) <= 1.0:
            raise ValueError(f"percentile must be in (0, 1], got {self.percentile}")
        if self.sample_lines is not None and check_non_negative_int(
                self.sample_lines, "sample_lines") < 1:
            raise ValueError("sample_lines must be >= 1")

    def _run(self, depth, threshold, connectivity):
        return run_layering(
            depth, threshold=threshold, connectivity=connectivity,
            layer_tolerance=self.layer_tolerance, far_is_low=self.far_is_low,
            seed=self.seed, estimator=self.estimator, percentile=self.percentile,
            sample_lines=self.sample_lines,
        )

    def fit(self, X, y=None):
        self._check_params()
        depth = check_depth_map(X)
        result = self._run(depth, self.threshold, self.connectivity)
        self.result_ = result
        self.labels_ = np.asarray(result.label_map.labels)
        self.object_layers_ = result.object_layers
        self.layer_table_ = result.layer_table
        self.threshold_ = result.threshold
        self.connectivity_ = result.connectivity
        self.n_object_layers_ = len(result.object_layers)
        self.n_objects_ = result.labeled.object_count
        self.n_layers_ = len(result.layer_table)
        self.n_features_in_ = depth.width
        return self

    def predict(self, X):
        """Layer another depth map using the thresholds chosen during fit."""
        check_is_fitted(self, "labels_")
        depth = check_depth_map(X)
        return np.asarray(self._run(depth, self.threshold_, self.connectivity_).label_map.labels)

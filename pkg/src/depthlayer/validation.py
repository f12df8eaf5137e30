"""Input checks for array-like depth maps."""
from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array

from .core import DepthMap, DepthMapError, make_depth_map


def check_depth_map(X, max_level: int | None = None) -> DepthMap:
    """Coerce ``X`` (a :class:`DepthMap` or 2D array-like) into a DepthMap.

    Float input is accepted only when every value is integral. Without an
    explicit ``max_level`` the smallest of 255/65535 covering the data is used.
    """
    if isinstance(X, DepthMap):
        if max_level is not None and X.max_level != max_level:
            return make_depth_map(X.width, X.height, max_level, X.values)
        return X
    arr = check_array(X, dtype=None, ensure_2d=True, ensure_min_samples=1,
                      ensure_min_features=1)
    if arr.dtype.kind not in "iubf":
        raise DepthMapError(f"depth values must be numeric, got dtype {arr.dtype}")
    if arr.dtype.kind == "f":
        if not np.array_equal(arr, np.round(arr)):
            raise DepthMapError("depth values must be integers")
        arr = arr.astype(np.int64)
    if max_level is None:
        top = int(arr.max())
        max_level = 255 if top <= 255 else 65535
    h, w = arr.shape
    return make_depth_map(w, h, max_level, arr)


def check_non_negative_int(value, name: str, allow_none: bool = False):
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)) or value < 0:
        raise ValueError(f"{name} must be a non-negative integer, got {value!r}")
    return int(value)

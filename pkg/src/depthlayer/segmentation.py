"""Edge localization: split each row into line-segments at large jumps."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DepthMap, LineSegment, _mode


@dataclass(frozen=True)
class RowSegments:
    rows: list[list[LineSegment]]
    threshold_used: int
    width: int

    @property
    def height(self) -> int:
        return len(self.rows)

    def __iter__(self):
        for row in self.rows:
            yield from row

    def __len__(self) -> int:
        return sum(len(r) for r in self.rows)


def row_breaks(values: np.ndarray, threshold: int) -> np.ndarray:
    """Columns ``c >= 1`` where ``|D(c) - D(c-1)| > threshold``."""
    jumps = np.abs(np.diff(values.astype(np.int64)))
    return np.flatnonzero(jumps > threshold) + 1


def segment_row(depth: DepthMap, row: int, threshold: int) -> list[LineSegment]:
    if threshold < 0:
        raise ValueError(f"threshold must be >= 0, got {threshold}")
    values = depth.row(row)
    starts = np.concatenate(([0], row_breaks(values, threshold)))
    ends = np.append(starts[1:] - 1, depth.width - 1)
    return [
        LineSegment(row=row, start=int(s), end=int(e), value=_mode(values[s : e + 1]))
        for s, e in zip(starts, ends)
    ]


def segment_all_rows(depth: DepthMap, threshold: int) -> RowSegments:
    rows = [segment_row(depth, i, threshold) for i in range(depth.height)]
    return RowSegments(rows=rows, threshold_used=int(threshold), width=depth.width)

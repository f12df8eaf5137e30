"""Synthetic depth scenes with exact ground truth.

Scenes are rasterized straight into depth space: each object is a flat,
fronto-parallel plateau with one depth value, stamped far-to-near so
nearer objects occlude farther ones. Larger gray values are nearer.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import DepthMap, make_depth_map
from .oracle import PixelPartition

BACKGROUND_DEPTH = 10
_PALETTE = [
    (200, 60, 50), (50, 130, 200), (240, 190, 40), (60, 170, 90),
    (150, 80, 180), (230, 120, 40), (70, 190, 190), (190, 70, 130),
]
_BACKGROUND_RGB = (215, 215, 210)


class SceneError(ValueError):
    """Raised for scene configurations that cannot be rasterized."""


@dataclass(frozen=True)
class SyntheticScene:
    depth: DepthMap
    truth: PixelPartition
    truth_object_count: int
    truth_layer_count: int
    color: np.ndarray | None = None
    object_ids: np.ndarray | None = None  # 0 = background, i = i-th configured object (1-based)


class _Canvas:
    def __init__(self, height: int, width: int, background: int, with_color: bool = True):
        self.depth = np.full((height, width), background, dtype=np.int64)
        self.base = self.depth.copy()
        self.obj = np.zeros((height, width), dtype=np.int64)
        self.color = None
        if with_color:
            self.color = np.empty((height, width, 3), dtype=np.uint8)
            self.color[:] = _BACKGROUND_RGB

    @property
    def yx(self):
        h, w = self.depth.shape
        return np.mgrid[0:h, 0:w]

    def stamp(self, mask: np.ndarray, depth: int, obj_id: int, rgb=None) -> None:
        self.depth[mask] = depth
        self.base[mask] = depth
        self.obj[mask] = obj_id
        if self.color is not None and rgb is not None:
            # simple vertical shading keeps the color image from looking flat
            h = self.depth.shape[0]
            shade = 0.75 + 0.25 * (1 - np.arange(h) / max(h - 1, 1))
            rgb_arr = np.clip(np.outer(shade, rgb), 0, 255).astype(np.uint8)
            rows = np.nonzero(mask)[0]
            self.color[mask] = rgb_arr[rows]

    def finish(self, max_level: int) -> SyntheticScene:
        h, w = self.depth.shape
        depth = make_depth_map(w, h, max_level, self.depth)
        truth, n_layers = _truth_from_objects(self.obj, self.base)
        n_objects = int(np.count_nonzero(np.unique(self.obj)))
        return SyntheticScene(
            depth=depth, truth=truth, truth_object_count=n_objects,
            truth_layer_count=n_layers, color=self.color, object_ids=self.obj,
        )


def _truth_from_objects(obj: np.ndarray, base_depth: np.ndarray) -> tuple[PixelPartition, int]:
    # visible objects sharing a base depth form one class; classes ordered far (low) first
    depth_of: dict[int, int] = {}
    for o, d in zip(obj.reshape(-1).tolist(), base_depth.reshape(-1).tolist()):
        depth_of.setdefault(o, d)
    values = sorted(set(depth_of.values()))
    class_of_value = {v: i + 1 for i, v in enumerate(values)}
    lut = np.zeros(max(depth_of) + 1, dtype=np.int64)
    for o, d in depth_of.items():
        lut[o] = class_of_value[d]
    h, w = obj.shape
    return PixelPartition(width=w, height=h, class_of=lut[obj], class_count=len(values)), len(values)


def _annulus(yy, xx, cy, cx, r_out, r_in):
    d2 = (yy - cy) ** 2 + (xx - cx) ** 2
    return (d2 <= r_out ** 2) & (d2 >= r_in ** 2)


def _ellipse(yy, xx, cy, cx, ry, rx):
    return ((yy - cy) / ry) ** 2 + ((xx - cx) / rx) ** 2 <= 1.0


def _box(yy, xx, y0, x0, y1, x1):
    return (yy >= y0) & (yy < y1) & (xx >= x0) & (xx < x1)


def gen_rings(
    ring_count: int = 3,
    radii: tuple[int, int] | list = (110, 80),
    depths=(60, 120, 180),
    occluder: bool = True,
    size: int = 512,
    background: int = BACKGROUND_DEPTH,
    offset: int | None = None,
    max_level: int = 255,
) -> SyntheticScene:
    """Rings on a horizontal line, listed far to near.

    ``radii`` is one ``(outer, inner)`` pair for all rings or one pair per
    ring. With ``occluder`` the centers are ``offset`` apart (default 90
    pixels, a bit under one outer radius) so each nearer ring cuts the
    farther ones into separate arcs; otherwise rings are spread apart.
    """
    depths = [int(d) for d in depths]
    if len(depths) != ring_count:
        raise SceneError(f"need {ring_count} depths, got {len(depths)}")
    if len(set(depths + [background])) != ring_count + 1:
        raise SceneError("ring and background depths must be distinct")
    if any(not 0 <= d <= max_level for d in depths + [background]):
        raise SceneError(f"depths must lie in 0..{max_level}")
    pairs = [tuple(radii)] * ring_count if np.ndim(radii) == 1 else [tuple(r) for r in radii]
    if len(pairs) != ring_count or any(not 0 < ri < ro for ro, ri in pairs):
        raise SceneError(f"bad radii {radii!r}")

    r_max = max(ro for ro, _ in pairs)
    if offset is None:
        offset = int(round(r_max * 0.82)) if occluder else 2 * r_max + 4
    cy = (size - 1) / 2
    cxs = [(size - 1) / 2 + (i - (ring_count - 1) / 2) * offset for i in range(ring_count)]
    for cx, (ro, _) in zip(cxs, pairs):
        if cx - ro < 0 or cx + ro > size - 1 or cy - ro < 0:
            raise SceneError(f"{ring_count} rings of radius {ro} do not fit in {size}x{size}")

    canvas = _Canvas(size, size, background)
    yy, xx = canvas.yx
    order = sorted(range(ring_count), key=lambda i: depths[i])
    for i in order:
        ro, ri = pairs[i]
        canvas.stamp(_annulus(yy, xx, cy, cxs[i], ro, ri), depths[i], i + 1,
                     _PALETTE[i % len(_PALETTE)])
    return canvas.finish(max_level)


def _pick_levels(rng, count, spacing, lo, hi):
    levels = np.arange(lo, hi + 1, spacing)
    if levels.size < count:
        raise SceneError(
            f"cannot fit {count} depth levels spaced {spacing} apart in {lo}..{hi}"
        )
    return [int(v) for v in rng.choice(levels, size=count, replace=False)]


def gen_random_plateaus(
    seed: int = 0,
    size: int | tuple[int, int] = 64,
    plateau_count: int = 5,
    min_step: int = 10,
    jitter: int = 0,
    shared_depths: bool = False,
    max_level: int = 255,
    max_tries: int = 2000,
) -> SyntheticScene:
    """Random non-overlapping rectangles and ellipses over a background.

    Depth levels (background included) sit ``min_step + jitter`` apart, so
    after adding per-pixel jitter in ``0..jitter`` neighbouring regions still
    differ by at least ``min_step``. ``shared_depths`` lets plateaus reuse
    levels, exercising same-depth merging.
    """
    if min_step < 2:
        raise SceneError("min_step must be >= 2")
    if jitter < 0:
        raise SceneError("jitter must be >= 0")
    h, w = (size, size) if np.ndim(size) == 0 else size
    rng = np.random.default_rng(seed)
    spacing = min_step + jitter
    top = max_level - jitter
    if shared_depths:
        pool = _pick_levels(rng, min(plateau_count, 3) + 1, spacing, 0, top)
        background, choices = pool[0], pool[1:]
        levels = [int(rng.choice(choices)) for _ in range(plateau_count)] if choices else []
    else:
        pool = _pick_levels(rng, plateau_count + 1, spacing, 0, top)
        background, levels = pool[0], pool[1:]

    canvas = _Canvas(h, w, background, with_color=False)
    yy, xx = canvas.yx
    taken = np.zeros((h, w), dtype=bool)
    lo_h, hi_h = max(3, h // 8), max(4, h // 3)
    lo_w, hi_w = max(3, w // 8), max(4, w // 3)
    placed = []
    for _ in range(plateau_count):
        for _try in range(max_tries):
            ph = int(rng.integers(lo_h, hi_h + 1))
            pw = int(rng.integers(lo_w, hi_w + 1))
            if ph > h or pw > w:
                continue
            y0 = int(rng.integers(0, h - ph + 1))
            x0 = int(rng.integers(0, w - pw + 1))
            if not taken[y0 : y0 + ph, x0 : x0 + pw].any():
                break
        else:
            raise SceneError(f"could not place {plateau_count} plateaus in {h}x{w}")
        taken[y0 : y0 + ph, x0 : x0 + pw] = True
        if rng.random() < 0.5:
            mask = _box(yy, xx, y0, x0, y0 + ph, x0 + pw)
        else:
            mask = _ellipse(yy, xx, y0 + (ph - 1) / 2, x0 + (pw - 1) / 2, ph / 2, pw / 2)
        placed.append(mask)

    # nearest last
    for i in sorted(range(len(placed)), key=lambda i: levels[i]):
        canvas.stamp(placed[i], levels[i], i + 1)
    if jitter:
        canvas.depth = canvas.base + rng.integers(0, jitter + 1, size=(h, w))
    return canvas.finish(max_level)


DEFAULT_OFFICE = [
    # back wall shelf, monitor, lamp, books, mug, phone; far to near
    {"shape": "box", "y": 40, "x": 30, "h": 150, "w": 450, "depth": 40},
    {"shape": "box", "y": 70, "x": 150, "h": 170, "w": 220, "depth": 80},
    {"shape": "ellipse", "y": 60, "x": 380, "h": 90, "w": 110, "depth": 110},
    {"shape": "box", "y": 200, "x": 60, "h": 110, "w": 140, "depth": 140},
    {"shape": "cylinder", "y": 210, "x": 170, "h": 110, "w": 70, "depth": 180},
    {"shape": "box", "y": 260, "x": 300, "h": 60, "w": 170, "depth": 220},
]


def _office_mask(yy, xx, spec):
    y, x, hh, ww = spec["y"], spec["x"], spec["h"], spec["w"]
    shape = spec.get("shape", "box")
    if shape == "box":
        return _box(yy, xx, y, x, y + hh, x + ww)
    if shape == "ellipse":
        return _ellipse(yy, xx, y + (hh - 1) / 2, x + (ww - 1) / 2, hh / 2, ww / 2)
    if shape == "cylinder":
        cap = max(2, ww // 6)
        cx = x + (ww - 1) / 2
        body = _box(yy, xx, y + cap, x, y + hh - cap, x + ww)
        top = _ellipse(yy, xx, y + cap, cx, cap, ww / 2)
        bottom = _ellipse(yy, xx, y + hh - cap - 1, cx, cap, ww / 2)
        return body | top | bottom
    raise SceneError(f"unknown shape {shape!r}")


def gen_office(
    objects: list[dict] | None = None,
    size: tuple[int, int] = (384, 512),
    background: int = BACKGROUND_DEPTH,
    max_level: int = 255,
) -> SyntheticScene:
    """A clutter of boxes, cylinders and ellipses with mutual occlusion.

    Each object dict carries ``shape`` (box/cylinder/ellipse), top-left
    ``y``/``x``, extent ``h``/``w`` and ``depth``; optional ``color``.
    """
    objects = DEFAULT_OFFICE if objects is None else objects
    h, w = size
    canvas = _Canvas(h, w, background)
    yy, xx = canvas.yx
    for spec in objects:
        for key in ("y", "x", "h", "w", "depth"):
            if key not in spec:
                raise SceneError(f"object {spec!r} missing {key!r}")
        if spec["y"] < 0 or spec["x"] < 0 or spec["y"] + spec["h"] > h or spec["x"] + spec["w"] > w:
            raise SceneError(f"object {spec!r} does not fit in {h}x{w}")
        if not 0 <= spec["depth"] <= max_level:
            raise SceneError(f"depth {spec['depth']} outside 0..{max_level}")
    order = sorted(range(len(objects)), key=lambda i: objects[i]["depth"])
    for i in order:
        spec = objects[i]
        rgb = spec.get("color", _PALETTE[i % len(_PALETTE)])
        canvas.stamp(_office_mask(yy, xx, spec), int(spec["depth"]), i + 1, rgb)
    return canvas.finish(max_level)


SCENES = {"rings": gen_rings, "office": gen_office, "plateaus": gen_random_plateaus}

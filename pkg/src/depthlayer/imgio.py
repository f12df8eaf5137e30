"""Reading depth maps and writing label maps, visualizations and run reports.

Portable graymaps (P2/P5, 8 or 16 bit) are handled here directly; PNG goes
through Pillow. Gray values are never rescaled.
"""
from __future__ import annotations

import hashlib
import json
import os
from pathlib import Path

import numpy as np
from PIL import Image

from .core import DepthMap, DepthMapError, make_depth_map

SCHEMA_VERSION = 1


class ImageFormatError(ValueError):
    pass


def _pgm_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    # header tokens separated by whitespace, '#' comments run to end of line
    tokens, i = [], 2
    while len(tokens) < count:
        while i < len(data) and data[i : i + 1].isspace():
            i += 1
        if i >= len(data):
            raise ImageFormatError("corrupt graymap header: unexpected end of file")
        if data[i : i + 1] == b"#":
            while i < len(data) and data[i : i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        j = i
        while j < len(data) and not data[j : j + 1].isspace() and data[j : j + 1] != b"#":
            j += 1
        tokens.append(data[i:j])
        i = j
    return tokens, i


def _read_pgm(data: bytes) -> DepthMap:
    magic = data[:2]
    (w, h, maxval), pos = _pgm_tokens(data, 3)
    try:
        width, height, max_level = int(w), int(h), int(maxval)
    except ValueError:
        raise ImageFormatError(f"corrupt graymap header: {w!r} {h!r} {maxval!r}") from None
    if width < 1 or height < 1 or not 0 < max_level < 65536:
        raise ImageFormatError(f"corrupt graymap header: {width}x{height} maxval {max_level}")
    expected = width * height
    if magic == b"P5":
        payload = data[pos + 1 :]
        nbytes = 1 if max_level < 256 else 2
        if len(payload) < expected * nbytes:
            raise ImageFormatError(
                f"pixel payload too short: expected {expected} pixels "
                f"({expected * nbytes} bytes), got {len(payload) // nbytes} pixels"
            )
        dtype = np.uint8 if nbytes == 1 else np.dtype(">u2")
        values = np.frombuffer(payload, dtype=dtype, count=expected)
    else:
        fields = data[pos:].split()
        if len(fields) < expected:
            raise ImageFormatError(
                f"pixel payload too short: expected {expected} pixels, got {len(fields)}"
            )
        try:
            values = np.array([int(f) for f in fields[:expected]], dtype=np.int64)
        except ValueError as exc:
            raise ImageFormatError(f"corrupt graymap payload: {exc}") from None
    try:
        return make_depth_map(width, height, max_level, values)
    except DepthMapError as exc:
        raise ImageFormatError(f"corrupt graymap payload: {exc}") from None


def _read_png(path: Path) -> DepthMap:
    with Image.open(path) as im:
        if im.mode == "L":
            arr, max_level = np.asarray(im), 255
        elif im.mode in ("I;16", "I;16B", "I"):
            arr, max_level = np.asarray(im).astype(np.int64), 65535
        else:
            raise ImageFormatError(f"{path}: PNG mode {im.mode!r} is not single-channel gray")
    return make_depth_map(arr.shape[1], arr.shape[0], max_level, arr)


def read_depth(path) -> DepthMap:
    """Load a P2/P5 graymap or an 8/16-bit grayscale PNG."""
    path = Path(path)
    data = path.read_bytes()
    if data[:2] in (b"P2", b"P5"):
        return _read_pgm(data)
    if data[:8] == b"\x89PNG\r\n\x1a\n":
        return _read_png(path)
    raise ImageFormatError(f"{path}: unknown format (expected P2/P5 graymap or PNG)")


def read_labels(path) -> np.ndarray:
    return read_depth(path).values


def read_color(path) -> np.ndarray:
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"))


def write_pgm(values: np.ndarray, path, max_level: int | None = None) -> None:
    """Binary graymap; 16-bit big-endian when ``max_level`` exceeds 255."""
    arr = np.asarray(values)
    if max_level is None:
        max_level = 255 if arr.max(initial=0) < 256 else 65535
    if arr.min(initial=0) < 0 or arr.max(initial=0) > max_level:
        raise ValueError(f"values outside 0..{max_level}")
    h, w = arr.shape
    header = f"P5\n{w} {h}\n{max_level}\n".encode("ascii")
    dtype = np.uint8 if max_level < 256 else np.dtype(">u2")
    Path(path).write_bytes(header + arr.astype(dtype).tobytes())


def write_depth(depth: DepthMap, path) -> None:
    write_pgm(depth.values, path, depth.max_level)


def write_label_map(labels, path) -> None:
    """Raw object-layer ids as a 16-bit graymap."""
    arr = np.asarray(getattr(labels, "labels", labels))
    if arr.max(initial=0) > 65535:
        raise ValueError("label ids beyond 65535 cannot be stored")
    write_pgm(arr, path, 65535)


def palette(count: int) -> np.ndarray:
    """Fixed colors for ids 0..count; id 1 is dark gray, the rest hash-derived."""
    colors = np.zeros((count + 1, 3), dtype=np.uint8)
    seen = {(0, 0, 0)}
    if count >= 1:
        colors[1] = (64, 64, 64)
        seen.add((64, 64, 64))
    for i in range(2, count + 1):
        salt = 0
        while True:
            digest = hashlib.blake2b(f"{i}:{salt}".encode(), digest_size=3).digest()
            rgb = tuple(digest)
            if rgb not in seen:
                break
            salt += 1
        seen.add(rgb)
        colors[i] = rgb
    return colors


def _save_png(arr: np.ndarray, path) -> None:
    Image.fromarray(arr).save(path, format="PNG", optimize=False)


def write_viz(labels, path, colors: np.ndarray | None = None) -> None:
    arr = np.asarray(getattr(labels, "labels", labels)).astype(np.int64)
    if colors is None:
        colors = palette(int(arr.max(initial=0)))
    _save_png(colors[arr], path)


def write_layer_images(labels, color: np.ndarray | None, out_dir, depth: DepthMap | None = None) -> list[Path]:
    """One RGBA image per object-layer; pixels outside the layer are transparent black.

    Without a color image, the depth map is shown as gray.
    """
    arr = np.asarray(getattr(labels, "labels", labels))
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if color is None:
        if depth is None:
            raise ValueError("need a color image or a depth map for layer images")
        gray = (depth.values * 255 // depth.max_level).astype(np.uint8)
        color = np.repeat(gray[:, :, None], 3, axis=2)
    if color.shape[:2] != arr.shape:
        raise ValueError(f"color image {color.shape[:2]} does not match labels {arr.shape}")
    paths = []
    for ol in range(1, int(arr.max(initial=0)) + 1):
        rgba = np.zeros(arr.shape + (4,), dtype=np.uint8)
        member = arr == ol
        rgba[member, :3] = color[member]
        rgba[member, 3] = 255
        p = out_dir / f"layer_{ol:03d}.png"
        _save_png(rgba, p)
        paths.append(p)
    return paths


def build_report(result, depth: DepthMap, include_timing: bool = False) -> dict:
    """Machine-readable summary of a layering run; see README for the schema."""
    table = result.layer_table
    records = []
    for ol in sorted(result.object_layers, key=lambda o: o.depth_rank):
        records.append({
            "id": ol.id,
            "depth_rank": ol.depth_rank,
            "representative_depth": ol.representative_depth,
            "layer_values": sorted(table.value_of(k) for k in ol.layer_numbers),
            "object_ids": sorted(ol.object_numbers),
            "pixel_count": ol.pixel_count,
        })
    report = {
        "schema_version": SCHEMA_VERSION,
        "width": depth.width,
        "height": depth.height,
        "max_level": depth.max_level,
        "threshold_used": result.threshold,
        "connectivity_used": result.connectivity,
        "layer_tolerance": table.tolerance,
        "estimator": result.estimate.method if result.estimate else None,
        "object_count": result.labeled.object_count,
        "layer_count": len(table),
        "object_layer_count": len(result.object_layers),
        "object_layers": records,
    }
    if include_timing:
        report["timing"] = {k: round(v, 6) for k, v in result.diagnostics["timing"].items()}
    return report


def write_report(report: dict, path) -> None:
    text = json.dumps(report, indent=2, ensure_ascii=True) + "\n"
    Path(path).write_text(text, encoding="ascii")


def ensure_dir(path) -> Path:
    path = Path(path)
    os.makedirs(path, exist_ok=True)
    return path

"""Command-line driver: ``depthlayer layer|synth|oracle|compare``.

Exit codes: 0 success/equivalent, 1 usage error, 2 I/O error,
3 internal-consistency error, 4 compared partitions differ.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import imgio
from .core import ConsistencyError, DepthMapError
from .linking import run_layering
from .oracle import compare_partitions, oracle_object_layers
from .synthgen import SCENES, SceneError
from .thresholding import DEFAULT_PERCENTILE, METHODS, estimate_threshold

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_CONSISTENCY, EXIT_DIFFERENT = 0, 1, 2, 3, 4
EMIT_CHOICES = ("label", "viz", "layers", "report")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _nonneg(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return value


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _fraction(text: str) -> float:
    value = float(text)
    if not 0.0 < value <= 1.0:
        raise argparse.ArgumentTypeError(f"percentile must be in (0, 1], got {text}")
    return value


def _emit(text: str) -> frozenset[str]:
    parts = {p.strip() for p in text.split(",") if p.strip()}
    if "all" in parts:
        return frozenset(EMIT_CHOICES)
    unknown = parts - set(EMIT_CHOICES)
    if unknown or not parts:
        raise argparse.ArgumentTypeError(
            f"--emit takes a comma list of {','.join(EMIT_CHOICES)}; got {text!r}"
        )
    return frozenset(parts)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="depthlayer", description="Depth-wise layering of depth images.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("layer", help="slice a depth map into object-layers")
    p.add_argument("depth")
    p.add_argument("--color", help="color image to cut into per-layer images")
    p.add_argument("--threshold", type=_nonneg, help="row cut threshold (default: estimated)")
    p.add_argument("--connectivity", type=_nonneg,
                   help="vertical linking tolerance (default: estimated column threshold)")
    p.add_argument("--layer-tolerance", type=_nonneg, default=0)
    p.add_argument("--estimator", choices=METHODS, default="percentile")
    p.add_argument("--percentile", type=_fraction, default=DEFAULT_PERCENTILE)
    p.add_argument("--sample-lines", type=_positive)
    p.add_argument("--far", choices=("low", "high"), default="low",
                   help="which gray values are far from the camera")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", default=".")
    p.add_argument("--emit", type=_emit, default=frozenset(EMIT_CHOICES))
    p.add_argument("--timing", action="store_true", help="add wall-clock timings to the report")

    p = sub.add_parser("synth", help="generate a synthetic scene with ground truth")
    p.add_argument("--scene", choices=sorted(SCENES), required=True)
    p.add_argument("--config", help="JSON file of generator keyword arguments")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)

    p = sub.add_parser("oracle", help="brute-force object-layer partition")
    p.add_argument("depth")
    p.add_argument("--connectivity", type=_nonneg)
    p.add_argument("--out", required=True)

    p = sub.add_parser("compare", help="compare two label maps up to relabeling")
    p.add_argument("labels_a")
    p.add_argument("labels_b")
    return parser


def _cmd_layer(args) -> int:
    depth = imgio.read_depth(args.depth)
    color = imgio.read_color(args.color) if args.color else None
    result = run_layering(
        depth,
        threshold=args.threshold,
        connectivity=args.connectivity,
        layer_tolerance=args.layer_tolerance,
        far_is_low=args.far == "low",
        seed=args.seed,
        estimator=args.estimator,
        percentile=args.percentile,
        sample_lines=args.sample_lines,
    )
    out = imgio.ensure_dir(args.out)
    if "label" in args.emit:
        imgio.write_label_map(result.label_map, out / "labels.pgm")
    if "viz" in args.emit:
        imgio.write_viz(result.label_map, out / "viz.png")
    if "layers" in args.emit:
        imgio.write_layer_images(result.label_map, color, out / "layers", depth=depth)
    if "report" in args.emit:
        report = imgio.build_report(result, depth, include_timing=args.timing)
        imgio.write_report(report, out / "report.json")
    print(
        f"m={len(result.object_layers)} object_count={result.labeled.object_count} "
        f"layer_count={len(result.layer_table)} threshold={result.threshold} "
        f"connectivity={result.connectivity}"
    )
    return EXIT_OK


def _cmd_synth(args) -> int:
    kwargs = {}
    if args.config:
        kwargs = json.loads(Path(args.config).read_text())
        if not isinstance(kwargs, dict):
            raise SceneError("scene config must be a JSON object")
    if args.scene == "plateaus":
        kwargs.setdefault("seed", args.seed)
    if isinstance(kwargs.get("size"), list):
        kwargs["size"] = tuple(kwargs["size"])
    scene = SCENES[args.scene](**kwargs)
    out = imgio.ensure_dir(args.out)
    imgio.write_depth(scene.depth, out / "depth.pgm")
    imgio.write_label_map(scene.truth.class_of, out / "truth.pgm")
    if scene.color is not None:
        imgio._save_png(scene.color, out / "color.png")
    meta = {
        "scene": args.scene,
        "truth_object_count": scene.truth_object_count,
        "truth_layer_count": scene.truth_layer_count,
        "width": scene.depth.width,
        "height": scene.depth.height,
    }
    imgio.write_report(meta, out / "scene.json")
    print(" ".join(f"{k}={v}" for k, v in meta.items()))
    return EXIT_OK


def _cmd_oracle(args) -> int:
    depth = imgio.read_depth(args.depth)
    connectivity = args.connectivity
    if connectivity is None:
        connectivity = 1 if depth.width == depth.height == 1 else \
            estimate_threshold(depth).column_threshold
    part = oracle_object_layers(depth, connectivity)
    out = imgio.ensure_dir(args.out)
    imgio.write_label_map(part.class_of, out / "oracle.pgm")
    print(f"class_count={part.class_count} connectivity={connectivity}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    a = imgio.read_labels(args.labels_a)
    b = imgio.read_labels(args.labels_b)
    if a.shape != b.shape:
        print(f"dimension mismatch: {a.shape} vs {b.shape}", file=sys.stderr)
        return EXIT_CONSISTENCY
    cmp = compare_partitions(a, b)
    print(f"equivalent={str(cmp.equivalent).lower()} "
          f"mismatched_pixel_pairs={cmp.mismatched_pixel_pairs}")
    return EXIT_OK if cmp.equivalent else EXIT_DIFFERENT


COMMANDS = {"layer": _cmd_layer, "synth": _cmd_synth, "oracle": _cmd_oracle,
            "compare": _cmd_compare}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    try:
        return COMMANDS[args.command](args)
    except FileNotFoundError as exc:
        print(f"error: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_IO
    except (imgio.ImageFormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ConsistencyError as exc:
        print(f"internal consistency error: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    except (DepthMapError, SceneError, ValueError, TypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())

"""Command-line front end.

Subcommands: gi, estimate, correct, benchmark, boxeval, synth, runtime.
Exit codes: 0 success, 2 bad arguments, 3 input/manifest I/O failure,
4 degenerate estimation (no gray candidates), 5 assertion threshold
violated.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import cv2
import numpy as np

from . import synthetic
from .baselines import BaselineParams
from .benchmark import (
    BOX_LABELS,
    ManifestRecord,
    MethodConfig,
    METHOD_REGISTRY,
    box_shrink_eval,
    measure_runtime,
    read_manifest,
    run_benchmark,
    write_manifest,
)
from .core import (
    ChromaVector,
    DegenerateEstimateError,
    ManifestError,
    NoGrayCandidatesError,
)
from .estimation import MultiParams, correct_image, estimate_global, estimate_spatial
from .grayness import GiParams, compute_gi, rank_gray
from .imgio import read_image, write_image, write_pseudocolor, write_raster
from .preprocess import RawImage, correct_levels, dark_mask, load_levels_config, saturation_mask

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_DEGENERATE = 4
EXIT_ASSERTION = 5


def _add_gi_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--epsilon", type=float, default=1e-4,
                   help="contrast threshold (default 1e-4)")
    p.add_argument("--kernel", type=int, default=5,
                   help="LoG kernel size (default 5)")
    p.add_argument("--window", type=int, default=7,
                   help="GI smoothing window (default 7)")
    p.add_argument("--log-floor", type=float, default=1e-6,
                   help="clamp applied before logarithms (default 1e-6)")


def _add_camera_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--camera", default="",
                   help="camera id for black/saturation correction (raw inputs)")
    p.add_argument("--levels", default=None,
                   help="camera-levels config path (default: bundled table, "
                        "or $GRAYPIXEL_CAMERAS)")


def _gi_params(args) -> GiParams:
    return GiParams(epsilon=args.epsilon, log_kernel_size=args.kernel,
                    smooth_window=args.window, log_floor=args.log_floor)


def _load_image(args):
    if args.camera:
        levels = load_levels_config(args.levels)
        if args.camera not in levels:
            raise ManifestError(f"no camera levels for {args.camera!r}")
        raw = cv2.imread(args.image, cv2.IMREAD_UNCHANGED)
        if raw is None:
            raise IOError(f"failed to decode image: {args.image}")
        arr = np.asarray(raw, dtype=np.float64)
        if arr.ndim == 2:
            arr = np.repeat(arr[:, :, None], 3, axis=2)
        else:
            arr = arr[:, :, :3][:, :, ::-1]
        return correct_levels(RawImage(arr), levels[args.camera])
    return read_image(args.image)


def cmd_gi(args) -> int:
    img = _load_image(args)
    mask = dark_mask(img) | saturation_mask(img)
    gimap = compute_gi(img, mask, _gi_params(args))
    rank_gray(gimap, args.top_percent)  # fails loudly when nothing survives
    prefix = Path(args.out_prefix or Path(args.image).stem + "_gi")
    write_raster(prefix.with_suffix(".raster"), gimap.values)
    write_pseudocolor(prefix.with_suffix(".png"), gimap.values)
    print(f"wrote {prefix.with_suffix('.raster')} and {prefix.with_suffix('.png')}",
          file=sys.stderr)
    return EXIT_OK


def cmd_estimate(args) -> int:
    img = _load_image(args)
    mask = dark_mask(img) | saturation_mask(img)
    gimap = compute_gi(img, mask, _gi_params(args))
    stem = Path(args.image).stem
    if args.multi is not None:
        pct = args.top_percent if args.top_percent is not None else 10.0
        params = MultiParams(top_percent=pct,
                             clusters=args.multi, sigma=args.sigma,
                             seed=args.seed)
        field = estimate_spatial(img, gimap, params)
        prefix = Path(args.out_prefix or stem + "_illum")
        write_raster(prefix.with_suffix(".raster"), field.data)
        print(f"wrote {prefix.with_suffix('.raster')}", file=sys.stderr)
        estimate = field
    else:
        pct = args.top_percent if args.top_percent is not None else 0.1
        coords = rank_gray(gimap, pct)
        chroma = estimate_global(img, coords)
        print(f"{stem},{chroma.r!r},{chroma.g!r},{chroma.b!r}")
        estimate = chroma
    if args.correct:
        write_image(args.correct, correct_image(img, estimate))
        print(f"wrote {args.correct}", file=sys.stderr)
    return EXIT_OK


def cmd_correct(args) -> int:
    img = _load_image(args)
    chroma = ChromaVector.from_rgb(*args.illuminant)
    write_image(args.out, correct_image(img, chroma))
    print(f"wrote {args.out}", file=sys.stderr)
    return EXIT_OK


def _method_config(args) -> MethodConfig:
    cfg = MethodConfig()
    if hasattr(args, "epsilon"):
        cfg.gi = _gi_params(args)
    if getattr(args, "top_percent", None) is not None:
        cfg.top_percent = args.top_percent
    if getattr(args, "sog_p", None) is not None:
        cfg.sog = BaselineParams(minkowski_p=args.sog_p, derivative_order=0,
                                 pre_smooth_sigma=0.0)
    if getattr(args, "edge_p", None) is not None or getattr(args, "edge_sigma", None) is not None:
        cfg.gray_edge = BaselineParams(
            minkowski_p=args.edge_p if args.edge_p is not None else 6.0,
            derivative_order=1,
            pre_smooth_sigma=args.edge_sigma if args.edge_sigma is not None else 2.0)
    return cfg


def _progress(label: str):
    def emit(done: int, total: int) -> None:
        print(f"\r{label}: {done}/{total}", end="" if done < total else "\n",
              file=sys.stderr)
    return emit


def cmd_benchmark(args) -> int:
    records = read_manifest(args.manifest)
    levels = load_levels_config(args.levels) if _manifest_needs_levels(records, args) else None
    report = run_benchmark(records, args.method, _method_config(args),
                           levels, jobs=args.jobs,
                           progress=_progress(f"benchmark[{args.method}]"))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    report.write_csv(out_dir / f"{args.method}_per_image.csv")
    summary = report.summary_text()
    (out_dir / f"{args.method}_summary.txt").write_text(summary)
    print(summary, end="")
    if args.assert_mean_below is not None and not (
            report.overall.mean < args.assert_mean_below):
        print(f"assertion failed: mean {report.overall.mean} >= "
              f"{args.assert_mean_below}", file=sys.stderr)
        return EXIT_ASSERTION
    return EXIT_OK


def _manifest_needs_levels(records, args) -> bool:
    return args.levels is not None or any(r.camera for r in records)


def cmd_boxeval(args) -> int:
    records = read_manifest(args.manifest)
    levels = load_levels_config(args.levels) if _manifest_needs_levels(records, args) else None
    tables = box_shrink_eval(records, args.method, _method_config(args), levels,
                             progress=_progress("boxeval"))
    lines = []
    for tag in sorted(tables):
        for label in BOX_LABELS:
            for key, value in tables[tag][label].as_dict().items():
                lines.append(f"{tag}.{label}.{key}={value!r}")
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    print(text, end="")
    return EXIT_OK


_PRESET_KIND = {
    "single": "gray-shading",
    "stripes": "near-gray-stripes",
    "adversarial": "colored-distractor",
    "two-illum": "gray-two-illum",
    "boxshrink-single": "gray-shading",
    "boxshrink-double": "gray-two-illum",
}


def _random_chroma(rng: np.random.Generator) -> tuple[float, float, float]:
    v = rng.uniform(0.2, 0.9, size=3)
    v = v / np.linalg.norm(v)
    return (float(v[0]), float(v[1]), float(v[2]))


def _paired_chroma(rng: np.random.Generator,
                   lo: float = 5.0, hi: float = 20.0):
    """Two illuminants separated by an angle in [lo, hi] degrees."""
    while True:
        a = np.array(_random_chroma(rng))
        b = np.array(_random_chroma(rng))
        ang = np.degrees(np.arccos(np.clip(np.dot(a, b), -1, 1)))
        if lo <= ang <= hi:
            return tuple(a.tolist()), tuple(b.tolist())


def cmd_synth(args) -> int:
    kind = _PRESET_KIND[args.preset]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    records = []
    two_illum = kind == "gray-two-illum"
    with_checker = two_illum or args.preset.startswith("boxshrink")
    for i in range(args.count):
        kwargs = dict(kind=kind, width=args.width, height=args.height,
                      seed=int(rng.integers(2 ** 31)))
        if two_illum:
            kwargs["illuminant"], kwargs["illuminant_b"] = _paired_chroma(rng)
        else:
            kwargs["illuminant"] = _random_chroma(rng)
        cfg = synthetic.SceneConfig(**kwargs)
        img, field = synthetic.render_config(cfg)
        stem = f"scene_{i:03d}"
        write_image(out / f"{stem}.pfm", img)
        (out / f"{stem}.txt").write_text(cfg.to_text())
        checker = None
        if with_checker:
            # a nominal checker rectangle; for double-illuminant scenes it
            # sits just inside the first illuminant's half
            side = 24
            cx = args.width // 2 - args.width // 32 if two_illum else args.width // 2
            checker = (cx - side // 2, args.height // 2 - side // 2, side, side)
        if field is not None:
            write_raster(out / f"{stem}_field.raster", field.data)
        gt = ChromaVector.from_rgb(*cfg.illuminant)
        records.append(ManifestRecord(
            image=f"{stem}.pfm", gt=gt, camera="", checker=checker,
            illum_tag="double" if two_illum else "single"))
    write_manifest(out / "manifest.csv", records)
    print(f"wrote {args.count} scene(s) and manifest to {out}", file=sys.stderr)
    return EXIT_OK


def cmd_runtime(args) -> int:
    if args.image:
        img = read_image(args.image)
    else:
        cfg = synthetic.SceneConfig(kind="gray-shading", width=args.width,
                                    height=args.height, seed=args.seed)
        img, _ = synthetic.render_config(cfg)
    seconds = measure_runtime(img, args.method, MethodConfig(), runs=args.runs)
    print(f"{args.method},{img.width}x{img.height},{seconds!r}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graypixel",
        description="Gray-pixel color constancy: grayness-index maps, "
                    "illuminant estimation and benchmarking.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gi", help="write the grayness-index map of an image")
    p.add_argument("image")
    p.add_argument("--out-prefix", default=None)
    p.add_argument("--top-percent", type=float, default=0.1,
                   help="gray-pixel fraction, percent (default 0.1)")
    _add_gi_flags(p)
    _add_camera_flags(p)
    p.set_defaults(func=cmd_gi)

    p = sub.add_parser("estimate", help="estimate the illuminant of an image")
    p.add_argument("image")
    p.add_argument("--multi", type=int, default=None, metavar="M",
                   help="estimate a spatial field with M clusters (default: global)")
    p.add_argument("--top-percent", type=float, default=None,
                   help="gray-pixel fraction, percent (default 0.1 global / 10 multi)")
    p.add_argument("--sigma", type=float, default=None,
                   help="blend bandwidth in pixels (default 0.2 x image diagonal)")
    p.add_argument("--seed", type=int, default=0, help="clustering seed (default 0)")
    p.add_argument("--correct", default=None, metavar="PATH",
                   help="also write the corrected image")
    p.add_argument("--out-prefix", default=None)
    _add_gi_flags(p)
    _add_camera_flags(p)
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("correct", help="apply a known illuminant to an image")
    p.add_argument("image")
    p.add_argument("--illuminant", type=float, nargs=3, required=True,
                   metavar=("R", "G", "B"))
    p.add_argument("--out", required=True)
    _add_camera_flags(p)
    p.set_defaults(func=cmd_correct)

    def add_method_flags(p):
        p.add_argument("--top-percent", type=float, default=None,
                       help="GI gray-pixel fraction, percent (default 0.1)")
        p.add_argument("--sog-p", type=float, default=None,
                       help="Shades-of-Gray Minkowski p (default 4)")
        p.add_argument("--edge-p", type=float, default=None,
                       help="Gray-Edge Minkowski p (default 6)")
        p.add_argument("--edge-sigma", type=float, default=None,
                       help="Gray-Edge pre-smoothing sigma (default 2)")
        _add_gi_flags(p)
        p.add_argument("--levels", default=None)

    p = sub.add_parser("benchmark", help="evaluate a method over a manifest")
    p.add_argument("manifest")
    p.add_argument("--method", default="gi", choices=sorted(METHOD_REGISTRY))
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out-dir", default="benchmark_out")
    p.add_argument("--assert-mean-below", type=float, default=None, metavar="DEG",
                   help="exit 5 unless the overall mean error is below DEG")
    add_method_flags(p)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("boxeval", help="shrinking-box evaluation around the checker")
    p.add_argument("manifest")
    p.add_argument("--method", default="gi", choices=sorted(METHOD_REGISTRY))
    p.add_argument("--out", default=None)
    add_method_flags(p)
    p.set_defaults(func=cmd_boxeval)

    p = sub.add_parser("synth", help="materialize seeded oracle scenes + manifest")
    p.add_argument("--preset", required=True, choices=sorted(_PRESET_KIND))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=5)
    p.add_argument("--width", type=int, default=512)
    p.add_argument("--height", type=int, default=512)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("runtime", help="median per-image wall time of a method")
    p.add_argument("--method", default="gi", choices=sorted(METHOD_REGISTRY))
    p.add_argument("--image", default=None)
    p.add_argument("--width", type=int, default=1920)
    p.add_argument("--height", type=int, default=1080)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--runs", type=int, default=5)
    p.set_defaults(func=cmd_runtime)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "multi", None) is not None and args.multi < 1:
        print("error: --multi must be >= 1", file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except (NoGrayCandidatesError, DegenerateEstimateError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ManifestError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())

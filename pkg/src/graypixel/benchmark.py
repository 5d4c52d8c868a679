"""Dataset benchmarking: manifests, angular error, summary statistics,
per-camera breakdowns and the shrinking-box experiment.

A manifest is a CSV with header
``image,gt_r,gt_g,gt_b,camera,checker_x,checker_y,checker_w,checker_h,illum_tag``.
Camera and checker fields may be empty; image paths are resolved relative
to the manifest file. The color-checker rectangle, when present, is always
masked out of estimation.
"""

from __future__ import annotations

import csv
import logging
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import cv2
import numpy as np

from .baselines import BaselineParams, gray_edge, gray_world, shades_of_gray, white_patch
from .core import ChromaVector, GrayPixelError, LinearImage, ManifestError
from .estimation import estimate_global
from .grayness import GiParams, compute_gi, rank_gray
from .imgio import read_image
from .preprocess import CameraLevels, RawImage, correct_levels, dark_mask, saturation_mask

log = logging.getLogger(__name__)

MANIFEST_COLUMNS = [
    "image", "gt_r", "gt_g", "gt_b", "camera",
    "checker_x", "checker_y", "checker_w", "checker_h", "illum_tag",
]

BOX_LABELS = ("A", "B", "C", "D", "E")
MIN_BOX_SIDE = 16


@dataclass(frozen=True)
class EvalStats:
    """The five benchmark columns, in degrees, plus the sample count."""

    mean: float
    median: float
    trimean: float
    best25: float
    worst25: float
    count: int

    def as_dict(self) -> dict[str, float]:
        return {
            "mean": self.mean, "median": self.median, "trimean": self.trimean,
            "best25": self.best25, "worst25": self.worst25, "count": self.count,
        }


@dataclass
class ManifestRecord:
    image: str
    gt: ChromaVector
    camera: str = ""
    checker: tuple[int, int, int, int] | None = None  # x, y, w, h
    illum_tag: str = "single"


@dataclass
class MethodConfig:
    """Per-run method parameters; defaults are the standard operating point
    (GI: epsilon 1e-4 / top 0.1%; SoG p=4; Gray-Edge p=6, sigma=2)."""

    gi: GiParams = field(default_factory=GiParams)
    top_percent: float = 0.1
    sog: BaselineParams = field(default_factory=lambda: BaselineParams(
        minkowski_p=4.0, derivative_order=0, pre_smooth_sigma=0.0))
    gray_edge: BaselineParams = field(default_factory=lambda: BaselineParams(
        minkowski_p=6.0, derivative_order=1, pre_smooth_sigma=2.0))

    def describe(self, method: str) -> dict[str, object]:
        """Parameters that affect `method`, for honest reporting."""
        if method == "gi":
            out = {"epsilon": self.gi.epsilon,
                   "log_kernel_size": self.gi.log_kernel_size,
                   "smooth_window": self.gi.smooth_window,
                   "log_floor": self.gi.log_floor,
                   "top_percent": self.top_percent}
            if self.gi.include_green:
                out["include_green"] = True
            return out
        if method == "shades-of-gray":
            return {"minkowski_p": self.sog.minkowski_p}
        if method.startswith("gray-edge"):
            return {"derivative_order": int(method[-1]),
                    "minkowski_p": self.gray_edge.minkowski_p,
                    "pre_smooth_sigma": self.gray_edge.pre_smooth_sigma}
        return {}


def angular_error(est: ChromaVector, gt: ChromaVector) -> float:
    """Angle between unit chroma vectors, in degrees.

    Computed as atan2(|a x b|, a.b): identical to arccos of the clamped dot
    product but well conditioned near 0 and 180 degrees, so identical
    vectors give exactly 0.
    """
    a = est.as_array()
    b = gt.as_array()
    cross = float(np.linalg.norm(np.cross(a, b)))
    return math.degrees(math.atan2(cross, float(np.dot(a, b))))


def summarize(errors) -> EvalStats:
    """Mean / median / trimean / best-25% / worst-25% of a list of errors.

    Quartiles use linear interpolation at positions 0.25/0.5/0.75 of
    (n - 1); the 25% tails are the lowest / highest ceil(n/4) values.
    """
    a = np.asarray(list(errors), dtype=np.float64)
    if a.size == 0:
        raise ValueError("empty error list")
    a = np.sort(a)
    q1, q2, q3 = np.quantile(a, [0.25, 0.5, 0.75])
    tail = math.ceil(a.size / 4)
    return EvalStats(
        mean=float(a.mean()),
        median=float(q2),
        trimean=float((q1 + 2 * q2 + q3) / 4),
        best25=float(a[:tail].mean()),
        worst25=float(a[-tail:].mean()),
        count=int(a.size),
    )


# ---------------------------------------------------------------------------
# method registry

def _estimate_gi(img: LinearImage, mask: np.ndarray, cfg: MethodConfig) -> ChromaVector:
    gimap = compute_gi(img, mask, cfg.gi)
    return estimate_global(img, rank_gray(gimap, cfg.top_percent))


METHOD_REGISTRY = {
    "gi": _estimate_gi,
    "gray-world": lambda img, mask, cfg: gray_world(img, mask),
    "white-patch": lambda img, mask, cfg: white_patch(img, mask),
    "shades-of-gray": lambda img, mask, cfg: shades_of_gray(img, mask, cfg.sog.minkowski_p),
    "gray-edge-1": lambda img, mask, cfg: gray_edge(
        img, mask, 1, cfg.gray_edge.minkowski_p, cfg.gray_edge.pre_smooth_sigma),
    "gray-edge-2": lambda img, mask, cfg: gray_edge(
        img, mask, 2, cfg.gray_edge.minkowski_p, cfg.gray_edge.pre_smooth_sigma),
}


def get_method(name: str):
    try:
        return METHOD_REGISTRY[name]
    except KeyError:
        known = ", ".join(sorted(METHOD_REGISTRY))
        raise KeyError(f"unknown method {name!r}; registered methods: {known}") from None


# ---------------------------------------------------------------------------
# manifests

def read_manifest(path: str | Path) -> list[ManifestRecord]:
    path = Path(path)
    if not path.is_file():
        raise ManifestError(f"no such manifest: {path}")
    records: list[ManifestRecord] = []
    problems: list[str] = []
    with open(path, newline="") as f:
        reader = csv.DictReader(f)
        if reader.fieldnames is None or [c.strip() for c in reader.fieldnames] != MANIFEST_COLUMNS:
            raise ManifestError(
                f"{path}: bad header, expected {','.join(MANIFEST_COLUMNS)}")
        for lineno, row in enumerate(reader, start=2):
            try:
                gt = ChromaVector.from_rgb(
                    float(row["gt_r"]), float(row["gt_g"]), float(row["gt_b"]))
                checker = None
                cells = [row[f"checker_{k}"].strip() for k in ("x", "y", "w", "h")]
                if any(cells):
                    checker = tuple(int(c) for c in cells)
                    if checker[2] <= 0 or checker[3] <= 0:
                        raise ValueError("checker rectangle must have positive size")
                img = row["image"].strip()
                if not img:
                    raise ValueError("empty image path")
                if not Path(img).is_absolute():
                    img = str(path.parent / img)
                records.append(ManifestRecord(
                    image=img, gt=gt, camera=row["camera"].strip(),
                    checker=checker, illum_tag=row["illum_tag"].strip() or "single"))
            except (ValueError, KeyError) as exc:
                problems.append(f"line {lineno}: {exc}")
    if problems:
        raise ManifestError(f"{path}: " + "; ".join(problems))
    if not records:
        raise ManifestError(f"empty manifest: {path}")
    return records


def write_manifest(path: str | Path, records: list[ManifestRecord]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(MANIFEST_COLUMNS)
        for r in records:
            checker = ["", "", "", ""] if r.checker is None else list(r.checker)
            writer.writerow([
                r.image, repr(r.gt.r), repr(r.gt.g), repr(r.gt.b), r.camera,
                *checker, r.illum_tag,
            ])


# ---------------------------------------------------------------------------
# benchmark runs

@dataclass
class RowResult:
    record: ManifestRecord
    estimate: ChromaVector | None
    error_deg: float | None
    status: str  # "ok" or the failure message


@dataclass
class BenchmarkReport:
    method: str
    rows: list[RowResult]
    overall: EvalStats
    per_camera: dict[str, EvalStats]
    per_tag: dict[str, EvalStats]
    failures: int
    params: dict = field(default_factory=dict)

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["image", "camera", "illum_tag", "est_r", "est_g",
                             "est_b", "gt_r", "gt_g", "gt_b", "angular_error", "status"])
            for row in self.rows:
                est = ["", "", ""]
                err = ""
                if row.estimate is not None:
                    est = [repr(row.estimate.r), repr(row.estimate.g), repr(row.estimate.b)]
                    err = repr(row.error_deg)
                writer.writerow([
                    row.record.image, row.record.camera, row.record.illum_tag,
                    *est, repr(row.record.gt.r), repr(row.record.gt.g),
                    repr(row.record.gt.b), err, row.status,
                ])

    def summary_text(self) -> str:
        lines = [f"method={self.method}", f"images={len(self.rows)}",
                 f"failed={self.failures}"]
        for key, value in self.params.items():
            lines.append(f"params.{key}={value!r}")
        for key, value in self.overall.as_dict().items():
            lines.append(f"overall.{key}={value!r}")
        for cam in sorted(self.per_camera):
            for key, value in self.per_camera[cam].as_dict().items():
                lines.append(f"camera.{cam}.{key}={value!r}")
        for tag in sorted(self.per_tag):
            for key, value in self.per_tag[tag].as_dict().items():
                lines.append(f"tag.{tag}.{key}={value!r}")
        return "\n".join(lines) + "\n"


def _load_linear(record: ManifestRecord,
                 levels: dict[str, CameraLevels] | None) -> LinearImage:
    """Decode the record's image; apply level correction when a camera is set."""
    if not record.camera:
        return read_image(record.image)
    if levels is None or record.camera not in levels:
        raise ManifestError(f"no camera levels for {record.camera!r}")
    path = Path(record.image)
    raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
    if raw is not None:
        arr = np.asarray(raw, dtype=np.float64)
        if arr.ndim == 2:
            arr = np.repeat(arr[:, :, None], 3, axis=2)
        else:
            arr = arr[:, :, :3][:, :, ::-1]  # cv2 decodes to BGR
    elif path.suffix.lower() == ".pfm":
        arr = read_image(path).data
    else:
        raise IOError(f"failed to decode image: {path}")
    return correct_levels(RawImage(arr), levels[record.camera])


def _checker_mask(shape: tuple[int, int], checker: tuple[int, int, int, int] | None) -> np.ndarray:
    mask = np.zeros(shape, dtype=bool)
    if checker is not None:
        x, y, w, h = checker
        mask[max(0, y):y + h, max(0, x):x + w] = True
    return mask


def _evaluate_record(record: ManifestRecord, method, cfg: MethodConfig,
                     levels: dict[str, CameraLevels] | None) -> RowResult:
    try:
        img = _load_linear(record, levels)
        mask = dark_mask(img) | saturation_mask(img)
        mask |= _checker_mask(mask.shape, record.checker)
        est = method(img, mask, cfg)
        return RowResult(record, est, angular_error(est, record.gt), "ok")
    except (GrayPixelError, IOError, ValueError) as exc:
        return RowResult(record, None, None, str(exc))


def run_benchmark(records: list[ManifestRecord], method_name: str,
                  cfg: MethodConfig | None = None,
                  levels: dict[str, CameraLevels] | None = None,
                  jobs: int = 1, progress=None) -> BenchmarkReport:
    """Evaluate one method over a manifest.

    Per-image failures become rows with an error status and are excluded
    from the statistics. Row order always follows the manifest, so results
    are identical for any job count. `progress(done, total)` is invoked
    after each image when given.
    """
    if not records:
        raise ManifestError("empty manifest")
    method = get_method(method_name)
    cfg = cfg or MethodConfig()

    rows = []
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = pool.map(lambda r: _evaluate_record(r, method, cfg, levels), records)
            for i, row in enumerate(results, start=1):
                rows.append(row)
                if progress:
                    progress(i, len(records))
    else:
        for i, record in enumerate(records, start=1):
            rows.append(_evaluate_record(record, method, cfg, levels))
            if progress:
                progress(i, len(records))

    errors = [r.error_deg for r in rows if r.status == "ok"]
    failures = len(rows) - len(errors)
    if failures:
        log.warning("%d image(s) failed during the %s run", failures, method_name)
    if not errors:
        raise ManifestError("every record failed; no statistics to report")

    def grouped(key) -> dict[str, EvalStats]:
        out: dict[str, EvalStats] = {}
        for name in sorted({key(r) for r in rows if key(r)}):
            vals = [r.error_deg for r in rows if r.status == "ok" and key(r) == name]
            if vals:
                out[name] = summarize(vals)
        return out

    return BenchmarkReport(
        method=method_name,
        rows=rows,
        overall=summarize(errors),
        per_camera=grouped(lambda r: r.record.camera),
        per_tag=grouped(lambda r: r.record.illum_tag),
        failures=failures,
        params=cfg.describe(method_name),
    )


# ---------------------------------------------------------------------------
# shrinking-box experiment

def _shrink_boxes(width: int, height: int,
                  checker: tuple[int, int, int, int]) -> list[tuple[int, int, int, int]]:
    """Boxes A..E as (x0, y0, x1, y1); A is the full image, each following
    box halves both sides, centered at the checker rectangle's center and
    clipped to the image bounds."""
    cx = checker[0] + checker[2] / 2.0
    cy = checker[1] + checker[3] / 2.0
    boxes = [(0, 0, width, height)]
    for k in range(1, len(BOX_LABELS)):
        w = width / 2 ** k
        h = height / 2 ** k
        x0 = int(round(np.clip(cx - w / 2, 0, width - w)))
        y0 = int(round(np.clip(cy - h / 2, 0, height - h)))
        boxes.append((x0, y0, x0 + int(round(w)), y0 + int(round(h))))
    return boxes


def box_shrink_eval(records: list[ManifestRecord], method_name: str,
                    cfg: MethodConfig | None = None,
                    levels: dict[str, CameraLevels] | None = None,
                    progress=None) -> dict[str, dict[str, EvalStats]]:
    """Run a method on nested crops centered at the color checker.

    Returns {illum_tag: {box_label: EvalStats}}. Records whose box E would
    fall below 16x16 pixels, or that fail estimation on any box, are
    skipped with a warning so every box's statistics cover the same
    records; every record must carry a checker rectangle.
    """
    if not records:
        raise ManifestError("empty manifest")
    method = get_method(method_name)
    cfg = cfg or MethodConfig()

    errors: dict[str, dict[str, list[float]]] = {}
    for i, record in enumerate(records, start=1):
        if progress:
            progress(i, len(records))
        if record.checker is None:
            raise ManifestError(f"{record.image}: box evaluation needs a checker rectangle")
        img = _load_linear(record, levels)
        boxes = _shrink_boxes(img.width, img.height, record.checker)
        ex0, ey0, ex1, ey1 = boxes[-1]
        if ex1 - ex0 < MIN_BOX_SIDE or ey1 - ey0 < MIN_BOX_SIDE:
            log.warning("skipping %s: box E is smaller than %dx%d",
                        record.image, MIN_BOX_SIDE, MIN_BOX_SIDE)
            continue
        base_mask = dark_mask(img) | saturation_mask(img)
        base_mask |= _checker_mask(base_mask.shape, record.checker)
        try:
            box_errors = []
            for x0, y0, x1, y1 in boxes:
                crop = LinearImage(img.data[y0:y1, x0:x1])
                est = method(crop, base_mask[y0:y1, x0:x1], cfg)
                box_errors.append(angular_error(est, record.gt))
        except GrayPixelError as exc:
            log.warning("skipping %s: %s", record.image, exc)
            continue
        per_tag = errors.setdefault(record.illum_tag, {label: [] for label in BOX_LABELS})
        for label, err in zip(BOX_LABELS, box_errors):
            per_tag[label].append(err)

    if not errors:
        raise ManifestError("no records were eligible for box evaluation")
    return {
        tag: {label: summarize(vals) for label, vals in by_box.items()}
        for tag, by_box in errors.items()
    }


# ---------------------------------------------------------------------------
# runtime measurement

def measure_runtime(img: LinearImage, method_name: str,
                    cfg: MethodConfig | None = None, runs: int = 5) -> float:
    """Median single-threaded wall time (seconds) of a method on one image."""
    if runs < 5:
        raise ValueError("need at least 5 timed runs")
    method = get_method(method_name)
    cfg = cfg or MethodConfig()
    mask = np.zeros((img.height, img.width), dtype=bool)
    previous = cv2.getNumThreads()
    cv2.setNumThreads(1)
    try:
        method(img, mask, cfg)  # warm-up
        times = []
        for _ in range(runs):
            start = time.perf_counter()
            method(img, mask, cfg)
            times.append(time.perf_counter() - start)
    finally:
        cv2.setNumThreads(previous)
    return float(np.median(times))

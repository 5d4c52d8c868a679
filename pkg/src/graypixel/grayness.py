"""Grayness index: per-pixel score of how likely a pixel sees a gray surface.

The index is the l2 norm of the local contrast (LoG) of the R and B
channel-to-luminance log residuals. For a pixel observing an achromatic
surface both residuals are locally constant regardless of shading or
specular intensity, so its index vanishes; lower is grayer.

Excluded pixels (masked, saturated, or without spatial cues) carry the
+inf sentinel and never participate in ranking or smoothing.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import (
    B,
    DEFAULT_LOG_FLOOR,
    G,
    LinearImage,
    NoGrayCandidatesError,
    R,
    box_mean,
    log_contrast,
    log_kernel,
)

EXCLUDED = np.inf


@dataclass(frozen=True)
class GiParams:
    """Parameters of the grayness-index computation.

    Defaults: contrast threshold 1e-4, 5-tap LoG, 7x7 smoothing — the
    standard single-illuminant operating point.
    """

    epsilon: float = 1e-4
    log_kernel_size: int = 5
    log_sigma: float = 0.5
    smooth_window: int = 7
    log_floor: float = DEFAULT_LOG_FLOOR
    include_green: bool = False  # experimental third residual

    def __post_init__(self):
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.log_floor <= 0:
            raise ValueError("log floor must be positive")
        for name in ("log_kernel_size", "smooth_window"):
            v = getattr(self, name)
            if v < 3 or v % 2 == 0:
                raise ValueError(f"{name} must be odd and >= 3")


class GrayIndexMap:
    """Per-pixel grayness, +inf where excluded."""

    __slots__ = ("values",)

    def __init__(self, values: np.ndarray):
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 2:
            raise ValueError("GI map must be 2-D")
        # the min rejects both negatives and -inf; +inf is the sentinel
        if np.isnan(arr).any() or arr.min() < 0:
            raise ValueError("GI values must be >= 0 or the +inf sentinel")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        self.values = arr

    @property
    def height(self) -> int:
        return self.values.shape[0]

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def excluded(self) -> np.ndarray:
        return ~np.isfinite(self.values)

    @property
    def n_valid(self) -> int:
        return int(np.isfinite(self.values).sum())


def compute_gi(img: LinearImage, mask: np.ndarray | None = None,
               params: GiParams = GiParams()) -> GrayIndexMap:
    """Compute the smoothed grayness-index map.

    `mask` flags pixels to exclude up front (True = discard). On top of it,
    pixels whose local contrast |C{I_i}| falls at or below epsilon in any
    channel (no spatial cues) and saturated pixels are excluded. The
    preliminary map is then averaged over `smooth_window` across surviving
    pixels only; exclusion is never undone by smoothing.
    """
    if mask is None:
        mask = np.zeros((img.height, img.width), dtype=bool)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (img.height, img.width):
        raise ValueError("mask dimensions must match the image")

    kernel = log_kernel(params.log_kernel_size, params.log_sigma)

    # shared log-luminance plane; identical arithmetic to log_residual
    log_lum = np.log(np.maximum(img.luminance(), params.log_floor))
    channels = (R, B, G) if params.include_green else (R, B)
    sq = np.zeros((img.height, img.width))
    for c in channels:
        residual = np.log(np.maximum(img.channel(c), params.log_floor)) - log_lum
        d = log_contrast(residual, kernel)
        sq += d * d
    prelim = np.sqrt(sq)

    excluded = mask.copy()
    sat = np.zeros_like(excluded)
    for c in (R, G, B):
        chan = img.channel(c)
        excluded |= np.abs(log_contrast(chan, kernel)) <= params.epsilon
        sat |= chan >= 1.0
    excluded |= sat

    smoothed = box_mean(np.where(excluded, EXCLUDED, prelim), params.smooth_window)
    return GrayIndexMap(smoothed)


def rank_gray(gimap: GrayIndexMap, top_percent: float) -> np.ndarray:
    """Coordinates of the lowest-GI pixels, shape (n, 2) as (row, col).

    n = max(1, round(top_percent/100 * n_valid)). Ties are broken by
    row-major pixel index, so the result is deterministic.
    """
    if not 0 < top_percent <= 100:
        raise ValueError("top_percent must be in (0, 100]")
    flat = gimap.values.ravel()
    n_valid = int(np.isfinite(flat).sum())
    if n_valid == 0:
        raise NoGrayCandidatesError("no gray candidates: every pixel is excluded")
    n = max(1, int(np.floor(top_percent / 100.0 * n_valid + 0.5)))
    n = min(n, n_valid)

    # partition instead of a full sort; resolve boundary ties in row-major
    # order so the selection is unique
    kth = np.partition(flat, n - 1)[n - 1]
    below = np.flatnonzero(flat < kth)
    need = n - below.size
    at = np.flatnonzero(flat == kth)[:need]
    idx = np.sort(np.concatenate([below, at]))
    return np.stack(np.unravel_index(idx, gimap.values.shape), axis=1)

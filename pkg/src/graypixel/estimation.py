"""Illuminant estimation from ranked gray pixels, plus von-Kries correction.

The single-illuminant estimate is the normalized mean RGB of the selected
gray pixels. The spatially varying estimate clusters the selected pixels
by position, averages per cluster, and blends the cluster illuminants at
every pixel with softmax weights exp(-D_m / (2 sigma^2)) over the pixel-to
-centroid distances D_m, which pulls nearby pixels toward the same light.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import ChromaVector, DegenerateEstimateError, IlluminantField, LinearImage
from .grayness import GrayIndexMap, rank_gray

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MultiParams:
    """Settings of the spatially-varying pipeline.

    sigma is the blending bandwidth in pixels; None means 0.2 x image
    diagonal. squared_distance switches the blending exponent from the
    printed -D/(2 sigma^2) form to the Gaussian -D^2/(2 sigma^2) variant.
    """

    top_percent: float = 10.0
    clusters: int = 2
    sigma: float | None = None
    seed: int = 0
    max_iters: int = 100
    squared_distance: bool = False

    def __post_init__(self):
        if self.clusters < 1:
            raise ValueError("clusters must be >= 1")
        if self.sigma is not None and self.sigma <= 0:
            raise ValueError("sigma must be positive")
        if not 0 < self.top_percent <= 100:
            raise ValueError("top_percent must be in (0, 100]")


def estimate_global(img: LinearImage, coords: np.ndarray) -> ChromaVector:
    """Normalized mean RGB over (row, col) coordinates."""
    coords = np.asarray(coords)
    if coords.size == 0:
        raise ValueError("coords must be non-empty")
    rows, cols = coords[:, 0], coords[:, 1]
    if rows.min() < 0 or rows.max() >= img.height or cols.min() < 0 or cols.max() >= img.width:
        raise ValueError("coordinate out of bounds")
    mean = img.data[rows, cols].mean(axis=0)
    if not mean.any():
        raise DegenerateEstimateError("degenerate estimate: selected pixels are all black")
    return ChromaVector.from_array(mean)


def _kmeans_pp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total <= 0:  # all points coincide with a chosen center
            centers[i:] = centers[0]
            break
        centers[i] = points[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, ((points - centers[i]) ** 2).sum(axis=1))
    return centers


def _kmeans(points: np.ndarray, k: int, seed: int, max_iters: int) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd iterations with k-means++ seeding.

    Returns (centroids, labels). Clusters that starve are dropped (the
    cluster count shrinks) rather than reseeded, so results stay
    deterministic for a fixed seed.
    """
    rng = np.random.default_rng(seed)
    k = min(k, points.shape[0])
    centers = _kmeans_pp_init(points, k, rng)
    labels = np.zeros(points.shape[0], dtype=np.intp)
    for _ in range(max_iters):
        d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
        new_labels = d2.argmin(axis=1)
        occupied = np.unique(new_labels)
        if occupied.size < centers.shape[0]:
            log.warning("dropping %d empty cluster(s)", centers.shape[0] - occupied.size)
            remap = np.full(centers.shape[0], -1, dtype=np.intp)
            remap[occupied] = np.arange(occupied.size)
            centers = centers[occupied]
            new_labels = remap[new_labels]
        moved = not np.array_equal(new_labels, labels)
        labels = new_labels
        centers = np.stack([points[labels == i].mean(axis=0) for i in range(centers.shape[0])])
        if not moved:
            break
    return centers, labels


def estimate_spatial(img: LinearImage, gimap: GrayIndexMap,
                     params: MultiParams = MultiParams()) -> IlluminantField:
    """Per-pixel illuminant field from position-clustered gray pixels."""
    coords = rank_gray(gimap, params.top_percent)
    points = coords.astype(np.float64)
    centers, labels = _kmeans(points, params.clusters, params.seed, params.max_iters)
    m = centers.shape[0]

    chromas = np.empty((m, 3))
    for i in range(m):
        chromas[i] = estimate_global(img, coords[labels == i]).as_array()

    sigma = params.sigma
    if sigma is None:
        sigma = 0.2 * float(np.hypot(img.height, img.width))

    yy, xx = np.mgrid[0:img.height, 0:img.width].astype(np.float64)
    dist = np.empty((img.height, img.width, m))
    for i in range(m):
        dist[:, :, i] = np.hypot(yy - centers[i, 0], xx - centers[i, 1])
    if params.squared_distance:
        dist = dist * dist
    expo = -dist / (2.0 * sigma * sigma)
    expo -= expo.max(axis=2, keepdims=True)  # softmax stabilization
    wts = np.exp(expo)
    wts /= wts.sum(axis=2, keepdims=True)

    field = wts @ chromas
    field /= np.linalg.norm(field, axis=2, keepdims=True)
    return IlluminantField(field)


def correct_image(img: LinearImage, illuminant: ChromaVector | IlluminantField) -> LinearImage:
    """Von-Kries diagonal correction, green-anchored, clipped to [0, 1]."""
    if isinstance(illuminant, ChromaVector):
        l = illuminant.as_array()[None, None, :]
    else:
        if (illuminant.height, illuminant.width) != (img.height, img.width):
            raise ValueError("field dimensions must match the image")
        l = illuminant.data
    if l.min() <= 0.0:
        raise DegenerateEstimateError("degenerate illuminant: zero component")
    gains = l[:, :, 1:2] / l
    return LinearImage(np.clip(img.data * gains, 0.0, 1.0))

"""Classical statistical illuminant estimators used as comparison rows.

Gray World, White Patch, Shades-of-Gray (Minkowski p-norm) and first/
second-order Gray Edge. All respect a discard mask and return unit-norm
chroma vectors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .core import ChromaVector, DegenerateEstimateError, LinearImage


@dataclass(frozen=True)
class BaselineParams:
    """Literature-standard defaults: SoG p=4; Gray-Edge n=1, p=6, sigma=2."""

    minkowski_p: float = 4.0
    derivative_order: int = 1
    pre_smooth_sigma: float = 2.0

    def __post_init__(self):
        if self.minkowski_p < 1:
            raise ValueError("minkowski_p must be >= 1")
        if self.derivative_order not in (0, 1, 2):
            raise ValueError("derivative_order must be 0, 1 or 2")
        if self.pre_smooth_sigma < 0:
            raise ValueError("pre_smooth_sigma must be non-negative")


def _valid_values(img: LinearImage, mask: np.ndarray | None) -> np.ndarray:
    if mask is None:
        return img.data.reshape(-1, 3)
    mask = np.asarray(mask, dtype=bool)
    if mask.shape != (img.height, img.width):
        raise ValueError("mask dimensions must match the image")
    if not mask.any():
        return img.data.reshape(-1, 3)
    if mask.all():
        raise ValueError("no valid pixels: the mask excludes everything")
    return img.data[~mask]


def gray_world(img: LinearImage, mask: np.ndarray | None = None) -> ChromaVector:
    """Normalized per-channel mean: the scene average is assumed achromatic."""
    return ChromaVector.from_array(_valid_values(img, mask).mean(axis=0))


def white_patch(img: LinearImage, mask: np.ndarray | None = None) -> ChromaVector:
    """Normalized per-channel maximum."""
    return ChromaVector.from_array(_valid_values(img, mask).max(axis=0))


def shades_of_gray(img: LinearImage, mask: np.ndarray | None = None,
                   p: float = 4.0) -> ChromaVector:
    """Normalized per-channel Minkowski p-mean; p=1 is Gray World, p=inf White Patch."""
    if p < 1:
        raise ValueError("p must be >= 1")
    if p == 1:
        return gray_world(img, mask)
    if math.isinf(p):
        return white_patch(img, mask)
    vals = _valid_values(img, mask)
    return ChromaVector.from_array(np.power(np.power(vals, p).mean(axis=0), 1.0 / p))


def gray_edge(img: LinearImage, mask: np.ndarray | None = None, order: int = 1,
              p: float = 6.0, sigma: float = 2.0) -> ChromaVector:
    """Minkowski p-mean of per-channel derivative magnitudes.

    order 1 uses the gradient magnitude of the Gaussian-smoothed channel,
    order 2 the absolute Laplacian. Masked pixels are replaced by the
    unmasked channel mean before smoothing so their content cannot leak
    into the statistics. A constant image has no edges and raises a
    degenerate-estimate error.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if p < 1:
        raise ValueError("p must be >= 1")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    if mask is not None:
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (img.height, img.width):
            raise ValueError("mask dimensions must match the image")
        if mask.all():
            raise ValueError("no valid pixels: the mask excludes everything")
        if not mask.any():
            mask = None
    comps = np.empty(3)
    for c in range(3):
        chan = img.channel(c)
        if mask is not None:
            chan = np.where(mask, chan[~mask].mean(), chan)
        smooth = ndimage.gaussian_filter(chan, sigma=sigma, mode="nearest")
        if order == 1:
            gy, gx = np.gradient(smooth)
            mag = np.hypot(gx, gy)
        else:
            mag = np.abs(ndimage.laplace(smooth, mode="nearest"))
        vals = mag if mask is None else mag[~mask]
        comps[c] = np.power(np.power(vals, p).mean(), 1.0 / p)
    if not comps.any():
        raise DegenerateEstimateError("degenerate estimate: image has no edges")
    return ChromaVector.from_array(comps)

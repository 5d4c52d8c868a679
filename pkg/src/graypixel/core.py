"""Image containers and the shared numerical kernels.

All pixel math in this package runs on float64 numpy arrays. A color image
is stored as an (H, W, 3) array in RGB order with values in [0, 1]; scalar
per-pixel quantities (log residuals, contrast maps, GI maps) are plain
(H, W) arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import cv2
import numpy as np

# channel indices into the last axis of image arrays
R, G, B = 0, 1, 2

# default clamp applied before every logarithm: black-level subtraction
# guarantees exact zeros exist, and log(0) must never be produced
DEFAULT_LOG_FLOOR = 1e-6


class GrayPixelError(Exception):
    """Base class for all errors raised by this package."""


class NoGrayCandidatesError(GrayPixelError):
    """Every pixel was excluded from gray candidacy."""


class DegenerateEstimateError(GrayPixelError):
    """An illuminant estimate collapsed to the zero vector."""


class SceneOverflowError(GrayPixelError):
    """A synthetic scene rendered values above 1."""


class ManifestError(GrayPixelError):
    """A dataset manifest is missing, empty or malformed."""


class LinearImage:
    """Linear-RGB raster with all values in [0, 1].

    The pixel data is frozen (read-only) after construction so images can be
    shared freely across threads.
    """

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"expected (H, W, 3) array, got shape {arr.shape}")
        if arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ValueError("image must be at least 1x1")
        if not np.all(np.isfinite(arr)):
            raise ValueError("image contains non-finite values")
        if arr.min() < 0.0 or arr.max() > 1.0:
            raise ValueError("image values must lie in [0, 1]")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        self.data = arr

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def channel(self, i: int) -> np.ndarray:
        return self.data[:, :, i]

    def luminance(self) -> np.ndarray:
        """Channel sum |I| = I_R + I_G + I_B, shape (H, W)."""
        d = self.data
        return d[:, :, 0] + d[:, :, 1] + d[:, :, 2]

    def scaled(self, s: float) -> "LinearImage":
        """Uniformly rescaled copy; the result must still fit in [0, 1]."""
        return LinearImage(self.data * float(s))

    def __eq__(self, other) -> bool:
        return isinstance(other, LinearImage) and np.array_equal(self.data, other.data)

    def __repr__(self) -> str:
        return f"LinearImage({self.width}x{self.height})"


@dataclass(frozen=True)
class ChromaVector:
    """Unit-norm RGB illuminant chromaticity."""

    r: float
    g: float
    b: float

    def __post_init__(self):
        v = np.array([self.r, self.g, self.b], dtype=np.float64)
        if not np.all(np.isfinite(v)):
            raise ValueError("chroma components must be finite")
        if v.min() < 0.0:
            raise ValueError("chroma components must be non-negative")
        n = float(np.linalg.norm(v))
        if abs(n - 1.0) > 1e-9:
            raise ValueError(f"chroma vector must be unit-norm, got |v| = {n!r}")

    @classmethod
    def from_rgb(cls, r: float, g: float, b: float) -> "ChromaVector":
        """Normalize an arbitrary non-negative RGB triple to unit length."""
        v = np.array([r, g, b], dtype=np.float64)
        if v.min() < 0.0:
            raise ValueError("chroma components must be non-negative")
        n = float(np.linalg.norm(v))
        if n == 0.0 or not np.isfinite(n):
            raise DegenerateEstimateError("degenerate estimate: zero chroma vector")
        v = v / n
        return cls(float(v[0]), float(v[1]), float(v[2]))

    @classmethod
    def from_array(cls, v: np.ndarray) -> "ChromaVector":
        v = np.asarray(v, dtype=np.float64).reshape(3)
        return cls.from_rgb(float(v[0]), float(v[1]), float(v[2]))

    def as_array(self) -> np.ndarray:
        return np.array([self.r, self.g, self.b], dtype=np.float64)


class IlluminantField:
    """Per-pixel unit-norm illuminant chromaticity, shape (H, W, 3)."""

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"expected (H, W, 3) array, got shape {arr.shape}")
        norms = np.linalg.norm(arr, axis=2)
        if not np.all(np.isfinite(arr)) or np.abs(norms - 1.0).max() > 1e-9:
            raise ValueError("field vectors must be finite and unit-norm")
        if arr.min() < 0.0:
            raise ValueError("field components must be non-negative")
        arr = np.ascontiguousarray(arr)
        arr.flags.writeable = False
        self.data = arr

    @property
    def height(self) -> int:
        return self.data.shape[0]

    @property
    def width(self) -> int:
        return self.data.shape[1]

    def at(self, row: int, col: int) -> ChromaVector:
        return ChromaVector.from_array(self.data[row, col])

    def __eq__(self, other) -> bool:
        return isinstance(other, IlluminantField) and np.array_equal(self.data, other.data)


def log_kernel(size: int = 5, sigma: float = 0.5) -> np.ndarray:
    """Laplacian-of-Gaussian kernel, mean-subtracted to an exact zero sum.

    Matches the classic fspecial('log') construction; the zero sum makes the
    response to any constant plane exactly zero (up to rounding).
    """
    if size < 3 or size % 2 == 0:
        raise ValueError("kernel size must be odd and >= 3")
    if sigma <= 0:
        raise ValueError("sigma must be positive")
    half = size // 2
    r = np.arange(-half, half + 1, dtype=np.float64)
    xx, yy = np.meshgrid(r, r)
    s2 = sigma * sigma
    g = np.exp(-(xx * xx + yy * yy) / (2.0 * s2))
    h = g / g.sum() * (xx * xx + yy * yy - 2.0 * s2) / (s2 * s2)
    return h - h.mean()


def log_residual(img: LinearImage, channel: int, floor: float = DEFAULT_LOG_FLOOR) -> np.ndarray:
    """log(channel) - log(luminance), both clamped below at `floor`.

    The residual is exactly invariant to uniform intensity scaling as long
    as no value is pushed into the clamp region.
    """
    if floor <= 0:
        raise ValueError("log floor must be positive")
    if channel not in (R, G, B):
        raise ValueError("channel must be one of R, G, B")
    c = np.maximum(img.channel(channel), floor)
    lum = np.maximum(img.luminance(), floor)
    return np.log(c) - np.log(lum)


def log_contrast(plane: np.ndarray, kernel: np.ndarray | None = None) -> np.ndarray:
    """Local contrast: convolution with the zero-sum LoG kernel.

    Borders are replicate-padded so no contrast is fabricated at the image
    edge. The kernel is symmetric, so correlation (what filter2D computes)
    equals convolution.
    """
    plane = np.ascontiguousarray(plane, dtype=np.float64)
    if plane.ndim != 2:
        raise ValueError("plane must be 2-D")
    if kernel is None:
        kernel = log_kernel()
    return cv2.filter2D(plane, -1, kernel, borderType=cv2.BORDER_REPLICATE)


def box_mean(plane: np.ndarray, window: int) -> np.ndarray:
    """Windowed arithmetic mean over the finite entries of `plane`.

    Non-finite entries mark excluded pixels: they contribute nothing to
    their neighbors' means and remain +inf in the output. Borders use
    replicate padding.
    """
    if window < 1 or window % 2 == 0:
        raise ValueError("window must be odd and >= 1")
    plane = np.asarray(plane, dtype=np.float64)
    if plane.ndim != 2:
        raise ValueError("plane must be 2-D")
    if window == 1:
        return plane.copy()
    def window_mean(p: np.ndarray) -> np.ndarray:
        return cv2.boxFilter(p, -1, (window, window), normalize=True,
                             borderType=cv2.BORDER_REPLICATE)

    valid = np.isfinite(plane)
    if valid.all():
        return window_mean(np.ascontiguousarray(plane))
    vals = window_mean(np.where(valid, plane, 0.0))
    cnt = window_mean(valid.astype(np.float64))
    # every valid center contributes to its own window, so cnt > 0 there
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = vals / cnt
    return np.where(valid, ratio, np.inf)

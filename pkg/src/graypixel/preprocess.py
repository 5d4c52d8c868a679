"""Black-level / saturation correction and dark- or clipped-pixel masking.

Raw counts are corrected per camera as v -> max(0, v - B) followed by
v -> min(1, v / (0.95 * S - B)). Masks flag pixels to *discard*: very
dark pixels (channel sum below 3.15% of the image maximum) and clipped
pixels (any channel at the clip value 1.0).
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import numpy as np

from .core import LinearImage

DARK_FRACTION = 0.0315

# environment override for the default camera-levels config
LEVELS_ENV_VAR = "GRAYPIXEL_CAMERAS"


@dataclass(frozen=True)
class CameraLevels:
    """Per-camera black level B and saturation level S, in raw counts."""

    camera_id: str
    black: float
    saturation: float

    def __post_init__(self):
        if not np.isfinite(self.black) or not np.isfinite(self.saturation):
            raise ValueError("levels must be finite")
        if self.black < 0:
            raise ValueError("black level must be non-negative")
        if self.saturation <= self.black:
            raise ValueError("saturation level must exceed black level")
        if 0.95 * self.saturation - self.black <= 0:
            raise ValueError(
                f"invalid levels for {self.camera_id}: 0.95*S - B must be positive"
            )


class RawImage:
    """Uncorrected sensor counts, (H, W, 3), non-negative."""

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray):
        arr = np.asarray(data, dtype=np.float64)
        if arr.ndim != 3 or arr.shape[2] != 3:
            raise ValueError(f"expected (H, W, 3) array, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)) or arr.min() < 0:
            raise ValueError("raw counts must be finite and non-negative")
        self.data = arr


def correct_levels(raw: RawImage, levels: CameraLevels) -> LinearImage:
    """Subtract the black level, normalize by 0.95*S - B and clip to [0, 1]."""
    denom = 0.95 * levels.saturation - levels.black
    v = np.maximum(0.0, raw.data - levels.black)
    v = np.minimum(1.0, v / denom)
    return LinearImage(v)


def dark_mask(img: LinearImage, reference: str = "channel-sum") -> np.ndarray:
    """Boolean mask of very dark pixels (True = discard).

    A pixel is flagged when its channel sum is at most DARK_FRACTION times
    the image-wide maximum. `reference` selects what "maximum" means:
    "channel-sum" (default) compares against the largest channel sum,
    "max-channel" against the largest single channel value times 3.
    """
    lum = img.luminance()
    if reference == "channel-sum":
        ref = lum.max()
    elif reference == "max-channel":
        ref = 3.0 * img.data.max()
    else:
        raise ValueError(f"unknown reference mode: {reference!r}")
    return lum <= DARK_FRACTION * ref


def saturation_mask(img: LinearImage) -> np.ndarray:
    """Boolean mask of clipped pixels: any channel at the clip value 1.0."""
    d = img.data
    return np.maximum(np.maximum(d[:, :, 0], d[:, :, 1]), d[:, :, 2]) >= 1.0


def default_mask(img: LinearImage) -> np.ndarray:
    """Union of the dark and saturation masks."""
    return dark_mask(img) | saturation_mask(img)


def parse_levels_config(text: str) -> dict[str, CameraLevels]:
    """Parse a camera-levels config: `<camera_id> <black> <saturation>` lines.

    Blank lines and '#' comments are ignored.
    """
    table: dict[str, CameraLevels] = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected '<camera_id> <black> <saturation>'")
        cam, black, sat = parts
        table[cam] = CameraLevels(cam, float(black), float(sat))
    return table


def load_levels_config(path: str | Path | None = None) -> dict[str, CameraLevels]:
    """Load camera levels from `path`, $GRAYPIXEL_CAMERAS, or the bundled table."""
    if path is None:
        path = os.environ.get(LEVELS_ENV_VAR)
    if path is None:
        text = resources.files("graypixel.data").joinpath("cameras.conf").read_text()
    else:
        text = Path(path).read_text()
    return parse_levels_config(text)

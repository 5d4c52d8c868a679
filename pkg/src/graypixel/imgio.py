"""Image and raster file I/O.

Supported inputs: 8/16-bit PNG and TIFF (values divided by the type
maximum) and 32-bit float PFM (assumed already in [0, 1]). No color
profiles are interpreted; files are taken to be linear RGB.

Two package-specific binary formats are defined here:

* float raster (``.raster``) -- header ``GPFR``, uint32 width / height /
  plane count (little-endian), then float32 values, row-major, one full
  plane after another. Excluded pixels are encoded as +inf. GI maps are
  one plane; illuminant fields are three.
* PFM follows the conventional netpbm layout (bottom-up rows, scale sign
  giving the byte order).
"""

from __future__ import annotations

import struct
from pathlib import Path

import cv2
import numpy as np

from .core import LinearImage

RASTER_MAGIC = b"GPFR"

_IMAGE_SUFFIXES = {".png", ".tif", ".tiff"}


def read_image(path: str | Path) -> LinearImage:
    """Load a PNG/TIFF/PFM file as a LinearImage."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(f"no such image: {path}")
    suffix = path.suffix.lower()
    if suffix == ".pfm":
        arr = read_pfm(path)
        if arr.ndim == 2:
            arr = np.repeat(arr[:, :, None], 3, axis=2)
        return LinearImage(np.clip(arr, 0.0, 1.0))
    if suffix in _IMAGE_SUFFIXES:
        raw = cv2.imread(str(path), cv2.IMREAD_UNCHANGED)
        if raw is None:
            raise IOError(f"failed to decode image: {path}")
        if raw.ndim == 2:
            raw = np.repeat(raw[:, :, None], 3, axis=2)
        if raw.shape[2] == 4:
            raw = raw[:, :, :3]
        if raw.dtype == np.uint8:
            arr = raw.astype(np.float64) / 255.0
        elif raw.dtype == np.uint16:
            arr = raw.astype(np.float64) / 65535.0
        else:
            arr = np.clip(raw.astype(np.float64), 0.0, 1.0)
        return LinearImage(arr[:, :, ::-1])  # BGR -> RGB
    raise IOError(f"unsupported image format: {path}")


def write_image(path: str | Path, img: LinearImage) -> None:
    """Write a LinearImage; 16-bit for PNG/TIFF, float32 for PFM."""
    path = Path(path)
    suffix = path.suffix.lower()
    if suffix == ".pfm":
        write_pfm(path, img.data.astype(np.float32))
        return
    if suffix in _IMAGE_SUFFIXES:
        q = np.rint(img.data * 65535.0).astype(np.uint16)
        if not cv2.imwrite(str(path), q[:, :, ::-1]):
            raise IOError(f"failed to write image: {path}")
        return
    raise IOError(f"unsupported image format: {path}")


def read_pfm(path: str | Path) -> np.ndarray:
    with open(path, "rb") as f:
        header = f.readline().strip()
        if header == b"PF":
            channels = 3
        elif header == b"Pf":
            channels = 1
        else:
            raise IOError(f"not a PFM file: {path}")
        dims = f.readline().split()
        width, height = int(dims[0]), int(dims[1])
        scale = float(f.readline().strip())
        endian = "<" if scale < 0 else ">"
        count = width * height * channels
        data = np.frombuffer(f.read(count * 4), dtype=endian + "f4", count=count)
    shape = (height, width, channels) if channels == 3 else (height, width)
    arr = data.reshape(shape).astype(np.float64)
    return arr[::-1]  # PFM rows are stored bottom-up


def write_pfm(path: str | Path, arr: np.ndarray) -> None:
    arr = np.asarray(arr, dtype=np.float32)
    if arr.ndim == 3 and arr.shape[2] == 3:
        header = b"PF"
    elif arr.ndim == 2:
        header = b"Pf"
    else:
        raise ValueError("PFM supports (H, W) or (H, W, 3) arrays")
    with open(path, "wb") as f:
        f.write(header + b"\n")
        f.write(f"{arr.shape[1]} {arr.shape[0]}\n".encode())
        f.write(b"-1.0\n")  # little-endian
        f.write(np.ascontiguousarray(arr[::-1]).astype("<f4").tobytes())


def write_raster(path: str | Path, planes: np.ndarray) -> None:
    """Write one (H, W) plane or an (H, W, P) stack as a float raster."""
    arr = np.asarray(planes, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3:
        raise ValueError("expected (H, W) or (H, W, P) array")
    h, w, p = arr.shape
    with open(path, "wb") as f:
        f.write(RASTER_MAGIC)
        f.write(struct.pack("<III", w, h, p))
        for i in range(p):
            f.write(np.ascontiguousarray(arr[:, :, i]).astype("<f4").tobytes())


def read_raster(path: str | Path) -> np.ndarray:
    """Read a float raster; returns (H, W) for one plane, else (H, W, P)."""
    with open(path, "rb") as f:
        magic = f.read(4)
        if magic != RASTER_MAGIC:
            raise IOError(f"not a float raster: {path}")
        w, h, p = struct.unpack("<III", f.read(12))
        planes = []
        for _ in range(p):
            data = np.frombuffer(f.read(w * h * 4), dtype="<f4", count=w * h)
            planes.append(data.reshape(h, w).astype(np.float64))
    if p == 1:
        return planes[0]
    return np.stack(planes, axis=2)


def write_pseudocolor(path: str | Path, plane: np.ndarray) -> None:
    """8-bit pseudocolor PNG of a scalar plane for visual inspection.

    Finite values are min-max normalized and mapped so low values render
    dark blue and high values red; excluded (non-finite) pixels are black.
    """
    plane = np.asarray(plane, dtype=np.float64)
    valid = np.isfinite(plane)
    norm = np.zeros_like(plane)
    if valid.any():
        lo = plane[valid].min()
        hi = plane[valid].max()
        span = hi - lo
        if span > 0:
            norm[valid] = (plane[valid] - lo) / span
    u8 = np.rint(norm * 255.0).astype(np.uint8)
    colored = cv2.applyColorMap(u8, cv2.COLORMAP_JET)
    colored[~valid] = 0
    if not cv2.imwrite(str(Path(path)), colored):
        raise IOError(f"failed to write image: {path}")

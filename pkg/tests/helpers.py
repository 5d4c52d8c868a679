"""Brute-force oracles and small utilities shared across the tests.

Everything here is deliberately independent of the package internals:
plain loops and plain Python arithmetic, so the fast implementations are
checked against a second route.
"""

import math

import numpy as np


def brute_conv(plane: np.ndarray, kernel: np.ndarray) -> np.ndarray:
    """True 2-D convolution with replicate padding, nested loops."""
    h, w = plane.shape
    ry, rx = kernel.shape[0] // 2, kernel.shape[1] // 2
    out = np.zeros((h, w))
    for y in range(h):
        for x in range(w):
            acc = 0.0
            for i in range(-ry, ry + 1):
                for j in range(-rx, rx + 1):
                    yy = min(max(y - i, 0), h - 1)
                    xx = min(max(x - j, 0), w - 1)
                    acc += kernel[i + ry, j + rx] * plane[yy, xx]
            out[y, x] = acc
    return out


def brute_box_mean(plane: np.ndarray, window: int) -> np.ndarray:
    """Masked windowed mean with replicate padding, nested loops."""
    h, w = plane.shape
    r = window // 2
    out = np.full((h, w), np.inf)
    for y in range(h):
        for x in range(w):
            if not np.isfinite(plane[y, x]):
                continue
            acc, cnt = 0.0, 0
            for i in range(-r, r + 1):
                for j in range(-r, r + 1):
                    v = plane[min(max(y + i, 0), h - 1), min(max(x + j, 0), w - 1)]
                    if np.isfinite(v):
                        acc += v
                        cnt += 1
            out[y, x] = acc / cnt
    return out


def stats_oracle(values):
    """(mean, median, trimean, best25, worst25) via explicit interpolation."""
    s = sorted(float(v) for v in values)
    n = len(s)

    def quantile(p):
        pos = p * (n - 1)
        lo = math.floor(pos)
        hi = math.ceil(pos)
        return s[lo] + (s[hi] - s[lo]) * (pos - lo)

    tail = math.ceil(n / 4)
    return (
        sum(s) / n,
        quantile(0.5),
        (quantile(0.25) + 2 * quantile(0.5) + quantile(0.75)) / 4,
        sum(s[:tail]) / tail,
        sum(s[-tail:]) / tail,
    )


def chord_angle_deg(a, b) -> float:
    """Angle between unit vectors via the chord length; exact for tiny angles."""
    c = float(np.linalg.norm(np.asarray(a, float) - np.asarray(b, float)))
    return math.degrees(2.0 * math.asin(min(1.0, c / 2.0)))


def field_error_deg(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    dots = np.clip((a * b).sum(axis=2), -1.0, 1.0)
    return np.degrees(np.arccos(dots))


def random_chroma(rng: np.random.Generator) -> tuple:
    v = rng.uniform(0.2, 0.9, size=3)
    v /= np.linalg.norm(v)
    return tuple(float(c) for c in v)


def paired_chroma(rng: np.random.Generator, lo_deg: float, hi_deg: float) -> tuple:
    while True:
        a = np.array(random_chroma(rng))
        b = np.array(random_chroma(rng))
        sep = math.degrees(math.acos(min(1.0, max(-1.0, float(a @ b)))))
        if lo_deg <= sep <= hi_deg:
            return tuple(a.tolist()), tuple(b.tolist())

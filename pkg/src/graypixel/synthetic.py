"""Seeded synthetic scene renderer: body + surface reflection per channel.

Scenes are built from a small text-serializable recipe (kind, dimensions,
seed, illuminants) and rendered as I_i = (gamma_b * R_b_i + gamma_s * R_s_i)
* L_i. Gray regions use equal per-channel reflectance, so their chroma
equals the illuminant exactly; that makes every rendered scene a ground
-truth oracle for the estimation pipeline.

Scene kinds:

* ``gray-shading``        -- uniformly gray world under smooth shading.
* ``near-gray-stripes``   -- flat vertical stripes, slightly tinted gray;
                             contrast lives only on stripe edges.
* ``colored-distractor``  -- dominant textured colored surface with an
                             off-gray-world chroma plus a gray shaded patch.
* ``specular-patch``      -- gray shaded world with a vivid patch carrying
                             a specular highlight.
* ``gray-two-illum``      -- gray shaded world lit by two illuminants,
                             blended hard or with a horizontal ramp.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import ChromaVector, IlluminantField, LinearImage, SceneOverflowError

# rendered peak value at intensity 1.0; leaves headroom for scale tests
PEAK_VALUE = 0.52

SCENE_KINDS = (
    "gray-shading",
    "near-gray-stripes",
    "colored-distractor",
    "specular-patch",
    "gray-two-illum",
)


@dataclass
class SceneConfig:
    """Text-serializable recipe from which a scene is regenerated."""

    kind: str
    width: int = 512
    height: int = 512
    seed: int = 0
    illuminant: tuple[float, float, float] = (0.3, 0.6, 0.74)
    illuminant_b: tuple[float, float, float] | None = None
    blend: str = "hard-split"  # "hard-split" or "ramp"
    split_frac: float = 0.5
    intensity: float = 1.0

    def __post_init__(self):
        if self.kind not in SCENE_KINDS:
            raise ValueError(f"unknown scene kind: {self.kind!r}")
        if self.kind == "gray-two-illum" and self.illuminant_b is None:
            raise ValueError("gray-two-illum requires a second illuminant")
        if self.blend not in ("hard-split", "ramp"):
            raise ValueError(f"unknown blend mode: {self.blend!r}")

    def to_text(self) -> str:
        lines = [
            "# graypixel scene",
            f"kind {self.kind}",
            f"width {self.width}",
            f"height {self.height}",
            f"seed {self.seed}",
            "illuminant " + " ".join(repr(v) for v in self.illuminant),
        ]
        if self.illuminant_b is not None:
            lines.append("illuminant_b " + " ".join(repr(v) for v in self.illuminant_b))
            lines.append(f"blend {self.blend}")
            lines.append(f"split_frac {self.split_frac!r}")
        lines.append(f"intensity {self.intensity!r}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "SceneConfig":
        fields: dict[str, str] = {}
        for line in text.splitlines():
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            key, _, value = line.partition(" ")
            fields[key] = value.strip()
        if "kind" not in fields:
            raise ValueError("scene spec is missing 'kind'")
        kwargs: dict = {"kind": fields["kind"]}
        for key in ("width", "height", "seed"):
            if key in fields:
                kwargs[key] = int(fields[key])
        if "illuminant" in fields:
            kwargs["illuminant"] = tuple(float(v) for v in fields["illuminant"].split())
        if "illuminant_b" in fields:
            kwargs["illuminant_b"] = tuple(float(v) for v in fields["illuminant_b"].split())
        for key in ("split_frac", "intensity"):
            if key in fields:
                kwargs[key] = float(fields[key])
        if "blend" in fields:
            kwargs["blend"] = fields["blend"]
        return cls(**kwargs)


@dataclass
class SceneSpec:
    """Materialized per-pixel scene ready for rendering."""

    width: int
    height: int
    body_reflectance: np.ndarray  # (H, W, 3) in [0, 1]
    surface_reflectance: np.ndarray  # (H, W, 3) in [0, 1]
    gamma_b: np.ndarray  # (H, W) >= 0
    gamma_s: np.ndarray  # (H, W) >= 0
    illuminant: ChromaVector
    illuminant_b: ChromaVector | None = None
    blend_field: np.ndarray | None = None  # (H, W) in [0, 1]
    gray_region: np.ndarray | None = field(default=None, repr=False)  # bool (H, W)

    def _validate(self):
        shape = (self.height, self.width)
        for name in ("gamma_b", "gamma_s"):
            arr = getattr(self, name)
            if arr.shape != shape or arr.min() < 0:
                raise ValueError(f"{name} must be non-negative with shape {shape}")
        for name in ("body_reflectance", "surface_reflectance"):
            arr = getattr(self, name)
            if arr.shape != shape + (3,) or arr.min() < 0 or arr.max() > 1:
                raise ValueError(f"{name} must be in [0,1] with shape {shape + (3,)}")

    def reflected(self) -> np.ndarray:
        """Body + surface reflection before the illuminant, (H, W, 3)."""
        return (
            self.gamma_b[:, :, None] * self.body_reflectance
            + self.gamma_s[:, :, None] * self.surface_reflectance
        )


def render(scene: SceneSpec) -> LinearImage:
    """Render a single-illuminant scene; raises on values above 1."""
    if scene.illuminant_b is not None:
        raise ValueError("scene has two illuminants; use render_two_illuminant")
    scene._validate()
    img = scene.reflected() * scene.illuminant.as_array()[None, None, :]
    if img.max() > 1.0:
        raise SceneOverflowError(f"overflow: rendered value {img.max()} exceeds 1")
    return LinearImage(img)


def render_two_illuminant(scene: SceneSpec) -> tuple[LinearImage, IlluminantField]:
    """Render under a spatially varying illuminant; returns the true field."""
    if scene.illuminant_b is None or scene.blend_field is None:
        raise ValueError("scene is missing the second illuminant or blend field")
    scene._validate()
    beta = scene.blend_field
    if beta.shape != (scene.height, scene.width) or beta.min() < 0 or beta.max() > 1:
        raise ValueError("blend field must be in [0,1] and match the scene size")
    la = scene.illuminant.as_array()
    lb = scene.illuminant_b.as_array()
    eff = beta[:, :, None] * la[None, None, :] + (1.0 - beta)[:, :, None] * lb[None, None, :]
    eff = eff / np.linalg.norm(eff, axis=2, keepdims=True)
    img = scene.reflected() * eff
    if img.max() > 1.0:
        raise SceneOverflowError(f"overflow: rendered value {img.max()} exceeds 1")
    return LinearImage(img), IlluminantField(eff)


def smooth_field(height: int, width: int, rng: np.random.Generator,
                 n_waves: int = 3, period_range: tuple[float, float] = (24.0, 56.0)) -> np.ndarray:
    """Smooth low-frequency field in [-1, 1]: random-phase sinusoid mix."""
    yy, xx = np.mgrid[0:height, 0:width].astype(np.float64)
    f = np.zeros((height, width))
    for _ in range(n_waves):
        period = rng.uniform(*period_range)
        theta = rng.uniform(0, 2 * np.pi)
        phase = rng.uniform(0, 2 * np.pi)
        amp = rng.uniform(0.5, 1.0)
        k = 2 * np.pi / period
        f += amp * np.sin(k * (np.cos(theta) * xx + np.sin(theta) * yy) + phase)
    return f / np.abs(f).max()


def _headroom_scale(scene: SceneSpec, intensity: float) -> None:
    """Rescale intensities in place so the rendered peak is PEAK_VALUE*intensity."""
    if scene.illuminant_b is None:
        eff = scene.illuminant.as_array()[None, None, :]
    else:
        beta = scene.blend_field[:, :, None]
        eff = beta * scene.illuminant.as_array() + (1 - beta) * scene.illuminant_b.as_array()
        eff = eff / np.linalg.norm(eff, axis=2, keepdims=True)
    peak = (scene.reflected() * eff).max()
    s = PEAK_VALUE * intensity / peak
    scene.gamma_b = scene.gamma_b * s
    scene.gamma_s = scene.gamma_s * s


def _gray_shading(cfg: SceneConfig, rng: np.random.Generator) -> SceneSpec:
    h, w = cfg.height, cfg.width
    shading = 0.65 * (1.0 + 0.7 * smooth_field(h, w, rng, n_waves=int(rng.integers(2, 5))))
    return SceneSpec(
        width=w, height=h,
        body_reflectance=np.full((h, w, 3), 0.5),
        surface_reflectance=np.ones((h, w, 3)),
        gamma_b=shading,
        gamma_s=np.zeros((h, w)),
        illuminant=ChromaVector.from_rgb(*cfg.illuminant),
        gray_region=np.ones((h, w), dtype=bool),
    )


def _near_gray_stripes(cfg: SceneConfig, rng: np.random.Generator) -> SceneSpec:
    h, w = cfg.height, cfg.width
    levels = np.zeros(w)
    tints = np.zeros((w, 3))
    x = 0
    prev_level = None
    while x < w:
        stripe_w = int(rng.integers(18, 40))
        level = float(rng.uniform(0.3, 0.75))
        # adjacent stripes must differ enough to keep edge contrast far
        # from the epsilon band at any intensity scale in [0.25, 4]
        while prev_level is not None and abs(level - prev_level) < 0.12:
            level = float(rng.uniform(0.3, 0.75))
        tint = 1.0 + rng.uniform(-0.03, 0.03, size=3)
        levels[x:x + stripe_w] = level
        tints[x:x + stripe_w] = tint
        prev_level = level
        x += stripe_w
    refl = np.broadcast_to(0.5 * tints[None, :, :], (h, w, 3)).copy()
    gamma_b = np.broadcast_to(levels[None, :], (h, w)).copy()
    return SceneSpec(
        width=w, height=h,
        body_reflectance=refl,
        surface_reflectance=np.ones((h, w, 3)),
        gamma_b=gamma_b,
        gamma_s=np.zeros((h, w)),
        illuminant=ChromaVector.from_rgb(*cfg.illuminant),
        gray_region=np.ones((h, w), dtype=bool),
    )


def _colored_distractor(cfg: SceneConfig, rng: np.random.Generator) -> SceneSpec:
    h, w = cfg.height, cfg.width
    # vivid background chroma, textured independently per channel so the
    # log residual varies and the region cannot masquerade as gray
    base = rng.uniform(0.15, 0.9, size=3)
    base[int(rng.integers(0, 3))] = 0.9
    refl = np.empty((h, w, 3))
    for c in range(3):
        tex = smooth_field(h, w, rng, n_waves=3, period_range=(16.0, 40.0))
        refl[:, :, c] = base[c] * (1.0 + 0.12 * tex)
    refl = np.clip(refl, 0.0, 1.0)
    gamma_b = np.ones((h, w))

    # central gray patch with its own shading
    ph, pw = int(h * 0.45), int(w * 0.45)
    r0, c0 = (h - ph) // 2, (w - pw) // 2
    gray = np.zeros((h, w), dtype=bool)
    gray[r0:r0 + ph, c0:c0 + pw] = True
    refl[gray] = 0.5
    patch_shading = 0.8 * (1.0 + 0.55 * smooth_field(ph, pw, rng))
    gamma_b[r0:r0 + ph, c0:c0 + pw] = patch_shading
    return SceneSpec(
        width=w, height=h,
        body_reflectance=refl,
        surface_reflectance=np.ones((h, w, 3)),
        gamma_b=gamma_b,
        gamma_s=np.zeros((h, w)),
        illuminant=ChromaVector.from_rgb(*cfg.illuminant),
        gray_region=gray,
    )


def _specular_patch(cfg: SceneConfig, rng: np.random.Generator) -> SceneSpec:
    scene = _gray_shading(cfg, rng)
    h, w = cfg.height, cfg.width
    ph, pw = max(12, h // 8), max(12, w // 8)
    r0 = int(rng.integers(h // 8, h - ph - h // 8))
    c0 = int(rng.integers(w // 8, w - pw - w // 8))
    patch = np.zeros((h, w), dtype=bool)
    patch[r0:r0 + ph, c0:c0 + pw] = True
    vivid = np.array([0.85, 0.35, 0.2])
    scene.body_reflectance = scene.body_reflectance.copy()
    scene.body_reflectance[patch] = vivid
    # steep specular lobe over the patch; interface reflection is neutral
    yy, xx = np.mgrid[0:h, 0:w].astype(np.float64)
    d2 = (yy - (r0 + ph / 2)) ** 2 + (xx - (c0 + pw / 2)) ** 2
    lobe = np.exp(-d2 / (2.0 * (min(ph, pw) / 3.0) ** 2))
    scene.gamma_s = np.where(patch, 0.6 * scene.gamma_b * lobe, 0.0)
    scene.gray_region = ~patch
    return scene


def _gray_two_illum(cfg: SceneConfig, rng: np.random.Generator) -> SceneSpec:
    scene = _gray_shading(cfg, rng)
    h, w = cfg.height, cfg.width
    if cfg.blend == "hard-split":
        split = int(round(w * cfg.split_frac))
        beta = np.zeros((h, w))
        beta[:, :split] = 1.0
    else:
        beta = np.broadcast_to(np.linspace(1.0, 0.0, w)[None, :], (h, w)).copy()
    scene.illuminant_b = ChromaVector.from_rgb(*cfg.illuminant_b)
    scene.blend_field = beta
    return scene


_BUILDERS = {
    "gray-shading": _gray_shading,
    "near-gray-stripes": _near_gray_stripes,
    "colored-distractor": _colored_distractor,
    "specular-patch": _specular_patch,
    "gray-two-illum": _gray_two_illum,
}


def make_scene(cfg: SceneConfig) -> SceneSpec:
    """Materialize a scene from its recipe (seeded, deterministic)."""
    rng = np.random.default_rng(cfg.seed)
    scene = _BUILDERS[cfg.kind](cfg, rng)
    _headroom_scale(scene, cfg.intensity)
    return scene


def render_config(cfg: SceneConfig) -> tuple[LinearImage, IlluminantField | None]:
    """Build and render a recipe; the field is None for single-illuminant scenes."""
    scene = make_scene(cfg)
    if cfg.kind == "gray-two-illum":
        return render_two_illuminant(scene)
    return render(scene), None

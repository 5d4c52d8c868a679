"""Learning-free gray-pixel color constancy toolkit."""

from .baselines import BaselineParams, gray_edge, gray_world, shades_of_gray, white_patch
from .benchmark import (
    BenchmarkReport,
    EvalStats,
    ManifestRecord,
    MethodConfig,
    angular_error,
    box_shrink_eval,
    measure_runtime,
    read_manifest,
    run_benchmark,
    summarize,
    write_manifest,
)
from .core import (
    ChromaVector,
    DegenerateEstimateError,
    GrayPixelError,
    IlluminantField,
    LinearImage,
    ManifestError,
    NoGrayCandidatesError,
    SceneOverflowError,
    box_mean,
    log_contrast,
    log_kernel,
    log_residual,
)
from .estimation import MultiParams, correct_image, estimate_global, estimate_spatial
from .grayness import EXCLUDED, GiParams, GrayIndexMap, compute_gi, rank_gray
from .imgio import (
    read_image,
    read_raster,
    write_image,
    write_pseudocolor,
    write_raster,
)
from .preprocess import (
    CameraLevels,
    RawImage,
    correct_levels,
    dark_mask,
    load_levels_config,
    parse_levels_config,
    saturation_mask,
)
from .synthetic import (
    SceneConfig,
    SceneSpec,
    make_scene,
    render,
    render_config,
    render_two_illuminant,
    smooth_field,
)

__version__ = "0.1.0"

__all__ = [
    "BaselineParams", "BenchmarkReport", "CameraLevels", "ChromaVector",
    "DegenerateEstimateError", "EXCLUDED", "EvalStats", "GiParams",
    "GrayIndexMap", "GrayPixelError", "IlluminantField", "LinearImage",
    "ManifestError", "ManifestRecord", "MethodConfig", "MultiParams",
    "NoGrayCandidatesError", "RawImage", "SceneConfig", "SceneOverflowError",
    "SceneSpec", "angular_error", "box_mean", "box_shrink_eval", "compute_gi",
    "correct_image", "correct_levels", "dark_mask", "estimate_global",
    "estimate_spatial", "gray_edge", "gray_world", "load_levels_config",
    "log_contrast", "log_kernel", "log_residual", "make_scene",
    "measure_runtime", "parse_levels_config", "rank_gray", "read_image",
    "read_manifest", "read_raster", "render", "render_config",
    "render_two_illuminant", "run_benchmark", "saturation_mask",
    "shades_of_gray", "smooth_field", "summarize", "white_patch",
    "write_image", "write_manifest", "write_pseudocolor", "write_raster",
]

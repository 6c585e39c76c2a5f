"""Occlusion-robustness benchmark toolkit for binary segmentation."""

from .generate import (
    BINS,
    OCCLUSION_BIN_LABELS,
    OCCLUSION_TYPES,
    SeverityBin,
    generate_cutout_occlusion,
    generate_dataset,
    generate_tool_occlusion,
    occlusion_ratio,
)
from .metrics import dice, hd95, relative_degradation
from .prompts import box_prompt, point_prompt
from .protocol import MODES, TargetMasks, decompose, score_mode, select_target

__version__ = "0.1.0"

__all__ = [
    "BINS",
    "MODES",
    "OCCLUSION_BIN_LABELS",
    "OCCLUSION_TYPES",
    "SeverityBin",
    "TargetMasks",
    "box_prompt",
    "decompose",
    "dice",
    "generate_cutout_occlusion",
    "generate_dataset",
    "generate_tool_occlusion",
    "hd95",
    "occlusion_ratio",
    "point_prompt",
    "relative_degradation",
    "score_mode",
    "select_target",
    "__version__",
]

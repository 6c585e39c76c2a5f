"""Three-region evaluation targets and per-mode scoring.

An occluded sample decomposes into:
  visible   = full \\ occluder   (target pixels still on screen)
  invisible = full ∩ occluder    (target pixels hidden behind the occluder)

Scoring modes:
  full         plain metrics against the complete target
  visible_only plain metrics against the visible region; predictions that
               cover the occluder pay for it as false positives
  invisible    completion quality inside the hidden region only: the
               prediction is first restricted to that region, so covering
               the visible part is neither rewarded nor punished here.
               Undefined (absent) when the hidden region is empty.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import mask_utils as mu
from .errors import EmptyMaskError
from .metrics import dice, hd95

MODES = ("full", "visible_only", "invisible")


@dataclass(frozen=True)
class TargetMasks:
    full: np.ndarray
    visible: np.ndarray
    invisible: np.ndarray


def decompose(full, occluder):
    if not full.any():
        raise EmptyMaskError("cannot decompose an empty target")
    visible = mu.subtract(full, occluder)
    invisible = mu.intersect(full, occluder)
    return TargetMasks(full=full, visible=visible, invisible=invisible)


def select_target(targets, mode):
    """The mask a prediction is scored against in the given mode, or None
    when the mode is undefined for this sample."""
    if mode == "full":
        return targets.full
    if mode == "visible_only":
        return targets.visible
    if mode == "invisible":
        if not targets.invisible.any():
            return None
        return targets.invisible
    raise ValueError(f"unknown eval mode: {mode!r}")


def score_mode(pred, targets, mode):
    """(dsc, hd95) of pred in the given mode, or None when undefined."""
    target = select_target(targets, mode)
    if target is None:
        return None
    if mode == "invisible":
        pred = pred & targets.invisible
    return dice(pred, target), hd95(pred, target)

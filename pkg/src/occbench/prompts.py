"""Prompt derivation from ground-truth masks.

Two kinds:
- point: a pixel sampled uniformly among foreground pixels whose distance to
  the boundary is strictly above the median foreground distance (falls back
  to >= median when the strict set is empty, e.g. on 1-px-thin shapes).
- box: the tight bounding box grown by round(0.05 * side) on each of the four
  sides, clamped to the frame.

Both derive from the full ground-truth mask, occluded or not.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .mask_utils import Box, Point, bounding_box, distance_to_boundary, iround

KINDS = ("point", "box")


@dataclass(frozen=True)
class Prompt:
    kind: str
    point: Optional[Point] = None
    box: Optional[Box] = None


def point_prompt(mask, seed):
    """Interior point prompt; deterministic for a given (mask, seed)."""
    rng = np.random.default_rng(seed)
    d = distance_to_boundary(mask)  # raises on empty masks
    ys, xs = np.nonzero(mask)
    depths = d[ys, xs]
    median = np.sort(depths)[(depths.size - 1) // 2]  # lower median
    candidates = depths > median
    if not candidates.any():
        candidates = depths >= median
    idx = np.flatnonzero(candidates)
    pick = int(idx[rng.integers(idx.size)])
    return Prompt(kind="point", point=Point(int(xs[pick]), int(ys[pick])))


def box_prompt(mask):
    """Enlarged-bbox prompt. Deterministic, no randomness involved."""
    tight = bounding_box(mask)  # raises on empty masks
    h, w = mask.shape
    dx = iround(0.05 * tight.width)
    dy = iround(0.05 * tight.height)
    return Prompt(
        kind="box",
        box=Box(
            max(0, tight.x_min - dx),
            max(0, tight.y_min - dy),
            min(w - 1, tight.x_max + dx),
            min(h - 1, tight.y_max + dy),
        ),
    )

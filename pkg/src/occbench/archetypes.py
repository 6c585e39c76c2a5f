"""Deterministic stand-in predictors with pinned occlusion behaviors.

These run the full pipeline without any segmentation model while probing the
evaluation's discriminative power:

- occluder_aware:    segments exactly the visible target; never predicts
                     into the occluder footprint.
- occluder_agnostic: predicts the whole target and also covers occluder
                     pixels near it (the classic failure full-mask scoring
                     cannot see: instrument pixels counted as target).
- perfect_amodal:    the complete target, hidden pixels included.
- null:              predicts nothing.
- full_box:          fills the prompt box; with a point prompt the box
                     degenerates to that single pixel.

Optional boundary noise dilates or erodes by up to `noise` px, driven by the
caller-supplied RNG, so imperfect variants stay reproducible.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from . import mask_utils as mu

KINDS = ("occluder_aware", "occluder_agnostic", "perfect_amodal", "null", "full_box")


def _dilated_bbox_region(full):
    """Target bbox grown 10% per side (clamped), as a filled mask."""
    box = mu.bounding_box(full)
    h, w = full.shape
    dx = mu.iround(0.10 * box.width)
    dy = mu.iround(0.10 * box.height)
    out = np.zeros_like(full)
    out[
        max(0, box.y_min - dy) : min(h, box.y_max + dy + 1),
        max(0, box.x_min - dx) : min(w, box.x_max + dx + 1),
    ] = True
    return out


def _disk(radius):
    yy, xx = np.mgrid[-radius : radius + 1, -radius : radius + 1]
    return xx * xx + yy * yy <= radius * radius


def _perturb_boundary(pred, noise, rng):
    amount = int(rng.integers(0, noise + 1))
    if amount == 0:
        return pred
    grow = bool(rng.integers(2))
    struct = _disk(amount)
    if grow:
        return ndimage.binary_dilation(pred, structure=struct)
    return ndimage.binary_erosion(pred, structure=struct)


def predict(kind, full, occluder, prompt=None, noise=0, rng=None):
    """Prediction mask for one archetype on one sample.

    full/occluder are the sample's stored masks; prompt is required only by
    full_box. noise > 0 needs an rng (seed or generator).
    """
    if kind == "occluder_aware":
        pred = full & ~occluder
    elif kind == "occluder_agnostic":
        pred = full | (occluder & _dilated_bbox_region(full))
    elif kind == "perfect_amodal":
        pred = full.copy()
    elif kind == "null":
        pred = np.zeros_like(full)
    elif kind == "full_box":
        if prompt is None:
            raise ValueError("full_box needs a prompt")
        pred = np.zeros_like(full)
        if prompt.kind == "box":
            b = prompt.box
            pred[b.y_min : b.y_max + 1, b.x_min : b.x_max + 1] = True
        else:
            pred[prompt.point.y, prompt.point.x] = True
    else:
        raise ValueError(f"unknown archetype: {kind!r}")

    if noise > 0:
        pred = _perturb_boundary(pred, noise, np.random.default_rng(rng))
    return pred

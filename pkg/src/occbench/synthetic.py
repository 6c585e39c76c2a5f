"""Synthetic fixtures: blob targets over textured frames, plus a small
library of elongated instrument-like shapes. Everything derives from one
seed, so regenerated trees are byte-identical.
"""

from __future__ import annotations

import os

import numpy as np

from . import pngio
from .generate import ToolInstance
from .seeds import rng_for


def blob_mask(rng, size):
    """Random star-convex blob: an ellipse with low-order radial wobble."""
    cy = rng.uniform(0.40 * size, 0.60 * size)
    cx = rng.uniform(0.40 * size, 0.60 * size)
    base = rng.uniform(0.16 * size, 0.26 * size)
    stretch = rng.uniform(0.75, 1.3)
    n_terms = 3
    amps = rng.uniform(0.0, 0.12, size=n_terms)
    phases = rng.uniform(0.0, 2 * np.pi, size=n_terms)

    yy, xx = np.mgrid[0:size, 0:size]
    ang = np.arctan2(yy - cy, (xx - cx) / stretch)
    radius = base * np.ones_like(ang)
    for k in range(n_terms):
        radius += base * amps[k] * np.cos((k + 2) * ang + phases[k])
    dist = np.hypot((xx - cx) / stretch, yy - cy)
    mask = dist <= radius
    if not mask.any():
        mask[int(cy), int(cx)] = True
    return mask


def frame_image(rng, mask):
    """Pinkish textured frame with the target region tinted darker red."""
    h, w = mask.shape
    yy = np.linspace(0.0, 1.0, h)[:, None]
    base = np.empty((h, w, 3), dtype=np.float64)
    base[..., 0] = 150 + 40 * yy
    base[..., 1] = 80 + 25 * yy
    base[..., 2] = 85 + 20 * yy
    base += rng.normal(0.0, 12.0, size=(h, w, 3))
    tint = np.array([35.0, -20.0, -15.0])
    base[mask] += tint
    return np.clip(base, 0, 255).astype(np.uint8)


def tool_shape(rng, size):
    """Thin elongated shaft with a round jaw at one end, random heading."""
    canvas = int(size * 0.9)
    length = rng.uniform(0.62, 0.88) * canvas
    width = rng.uniform(0.07, 0.13) * canvas
    ang = rng.uniform(0.0, np.pi)
    cx = cy = canvas / 2.0
    yy, xx = np.mgrid[0:canvas, 0:canvas]
    axis = (xx - cx) * np.cos(ang) + (yy - cy) * np.sin(ang)
    perp = -(xx - cx) * np.sin(ang) + (yy - cy) * np.cos(ang)
    shaft = (np.abs(axis) <= length / 2) & (np.abs(perp) <= width / 2)
    jaw_x = cx + (length / 2) * np.cos(ang)
    jaw_y = cy + (length / 2) * np.sin(ang)
    jaw = np.hypot(xx - jaw_x, yy - jaw_y) <= width * 1.4
    mask = shaft | jaw
    if not mask.any():
        mask[int(cy), int(cx)] = True

    # brushed-metal look: axial gradient plus speckle
    span = np.abs(axis).max() or 1.0
    shade = 135 + 70 * (axis / span)
    rgb = np.empty((canvas, canvas, 3), dtype=np.float64)
    rgb[..., 0] = shade
    rgb[..., 1] = shade + 8
    rgb[..., 2] = shade + 14
    rgb += rng.normal(0.0, 6.0, size=rgb.shape)
    rgb = np.clip(rgb, 0, 255).astype(np.uint8)
    rgb[~mask] = 0
    return mask, rgb


def make_dataset(out_dir, n_images=64, size=96, seed=0):
    """Write images/<stem>.png + masks/<stem>.png pairs; returns the stems."""
    images = os.path.join(out_dir, "images")
    masks = os.path.join(out_dir, "masks")
    os.makedirs(images, exist_ok=True)
    os.makedirs(masks, exist_ok=True)
    stems = []
    for i in range(n_images):
        stem = f"img{i:03d}"
        rng = rng_for(seed, "synthetic", stem)
        mask = blob_mask(rng, size)
        image = frame_image(rng, mask)
        pngio.write_image(os.path.join(images, f"{stem}.png"), image)
        pngio.write_mask(os.path.join(masks, f"{stem}.png"), mask)
        stems.append(stem)
    return stems


def make_tool_library(out_dir, n_tools=8, size=96, seed=0):
    """Write <id>_rgb.png + <id>_mask.png pairs; returns the tool ids."""
    os.makedirs(out_dir, exist_ok=True)
    ids = []
    for i in range(n_tools):
        tool_id = f"tool{i}"
        rng = rng_for(seed, "synthetic-tool", tool_id)
        mask, rgb = tool_shape(rng, size)
        pngio.write_image(os.path.join(out_dir, f"{tool_id}_rgb.png"), rgb)
        pngio.write_mask(os.path.join(out_dir, f"{tool_id}_mask.png"), mask)
        ids.append(tool_id)
    return ids


def tool_instances(rng_seed, n_tools=8, size=96):
    """In-memory tool library, matching make_tool_library's content."""
    out = []
    for i in range(n_tools):
        tool_id = f"tool{i}"
        rng = rng_for(rng_seed, "synthetic-tool", tool_id)
        mask, rgb = tool_shape(rng, size)
        out.append(ToolInstance(source_id=tool_id, rgb=rgb, mask=mask))
    return out

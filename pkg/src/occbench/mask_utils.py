"""Binary-mask primitives: set algebra, geometry, transform, paste.

Masks are 2-D bool arrays, row-major, origin top-left; x indexes columns and
y indexes rows. The image border counts as background for boundary and
distance purposes, so a foreground pixel on the frame edge sits at distance 1.
"""

from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np
from scipy.ndimage import distance_transform_edt

from .errors import DegenerateTransformError, DimensionMismatchError, EmptyMaskError


class Point(NamedTuple):
    x: int
    y: int


class Box(NamedTuple):
    x_min: int
    y_min: int
    x_max: int
    y_max: int

    @property
    def width(self):
        return self.x_max - self.x_min + 1

    @property
    def height(self):
        return self.y_max - self.y_min + 1


def iround(v):
    """Round half up to int; equals round-half-away-from-zero for the
    non-negative values used throughout."""
    return int(math.floor(v + 0.5))


def _check_same_dims(a, b):
    if a.shape != b.shape:
        raise DimensionMismatchError(f"mask shapes differ: {a.shape} vs {b.shape}")


def intersect(a, b):
    _check_same_dims(a, b)
    return a & b


def subtract(a, b):
    _check_same_dims(a, b)
    return a & ~b


def area(m):
    return int(np.count_nonzero(m))


def bounding_box(m):
    """Tight inclusive bbox of the foreground."""
    ys, xs = np.nonzero(m)
    if xs.size == 0:
        raise EmptyMaskError("bounding_box of an empty mask")
    return Box(int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max()))


def centroid(m):
    """Mean foreground coordinate, rounded half away from zero."""
    ys, xs = np.nonzero(m)
    if xs.size == 0:
        raise EmptyMaskError("centroid of an empty mask")
    return Point(iround(float(xs.mean())), iround(float(ys.mean())))


def boundary_mask(m):
    """Foreground pixels with a background or out-of-image 4-neighbour."""
    p = np.pad(m, 1, constant_values=False)
    interior = (
        p[1:-1, 1:-1]
        & p[:-2, 1:-1]
        & p[2:, 1:-1]
        & p[1:-1, :-2]
        & p[1:-1, 2:]
    )
    return m & ~interior


def boundary_pixels(m):
    """Boundary coordinates as an (n, 2) int array of (x, y) rows."""
    ys, xs = np.nonzero(boundary_mask(m))
    return np.column_stack([xs, ys])


def distance_to_boundary(m):
    """Exact Euclidean distance from each foreground pixel to the nearest
    background or out-of-image pixel; background pixels carry 0."""
    if not m.any():
        raise EmptyMaskError("distance_to_boundary of an empty mask")
    padded = np.pad(m, 1, constant_values=False)
    return distance_transform_edt(padded)[1:-1, 1:-1].copy()


def _transform_grid(mask, scale, rotation):
    """Inverse-map sampling grid for scale-about-centroid then
    rotate-about-centroid. Returns (sy, sx, valid, centroid) where sy/sx index
    into the source raster for every output pixel."""
    if scale <= 0:
        raise ValueError("scale must be positive")
    ys, xs = np.nonzero(mask)
    if xs.size == 0:
        raise EmptyMaskError("transform of an empty mask")
    cx = float(xs.mean())
    cy = float(ys.mean())
    th = math.radians(rotation)
    cos_t = math.cos(th)
    sin_t = math.sin(th)

    # size the output window from the forward-mapped bbox corners
    corners = []
    for x in (xs.min(), xs.max()):
        for y in (ys.min(), ys.max()):
            fx = cos_t * scale * (x - cx) - sin_t * scale * (y - cy) + cx
            fy = sin_t * scale * (x - cx) + cos_t * scale * (y - cy) + cy
            corners.append((fx, fy))
    x_lo = math.floor(min(c[0] for c in corners)) - 2
    x_hi = math.ceil(max(c[0] for c in corners)) + 2
    y_lo = math.floor(min(c[1] for c in corners)) - 2
    y_hi = math.ceil(max(c[1] for c in corners)) + 2

    oy, ox = np.mgrid[y_lo : y_hi + 1, x_lo : x_hi + 1]
    ux = (cos_t * (ox - cx) + sin_t * (oy - cy)) / scale + cx
    uy = (-sin_t * (ox - cx) + cos_t * (oy - cy)) / scale + cy
    sx = np.floor(ux + 0.5).astype(np.int64)
    sy = np.floor(uy + 0.5).astype(np.int64)
    h, w = mask.shape
    valid = (sx >= 0) & (sx < w) & (sy >= 0) & (sy < h)
    # clamp so the fancy index is always legal; valid gates the result
    sx = np.clip(sx, 0, w - 1)
    sy = np.clip(sy, 0, h - 1)
    return sy, sx, valid


def transform_mask(mask, scale, rotation):
    """Scale about the centroid, then rotate about it, nearest-neighbour
    resampled onto a canvas sized to the transformed footprint.

    Raises DegenerateTransformError if nothing survives rasterization.
    """
    sy, sx, valid = _transform_grid(mask, scale, rotation)
    out = valid & mask[sy, sx]
    if not out.any():
        raise DegenerateTransformError(
            f"transform(scale={scale}, rotation={rotation}) left no pixels"
        )
    return out


def transform_mask_with_image(mask, image, scale, rotation):
    """transform_mask plus the identical resampling applied to an aligned
    RGB raster. Pixels outside the transformed mask are zeroed. Guarantees
    the returned pair stays pixel-aligned, so re-rendering a stored placement
    reproduces the same mask bit for bit."""
    if image.shape[:2] != mask.shape:
        raise DimensionMismatchError(
            f"image {image.shape[:2]} does not match mask {mask.shape}"
        )
    sy, sx, valid = _transform_grid(mask, scale, rotation)
    out = valid & mask[sy, sx]
    if not out.any():
        raise DegenerateTransformError(
            f"transform(scale={scale}, rotation={rotation}) left no pixels"
        )
    rgb = image[sy, sx]
    rgb[~out] = 0
    return out, rgb


def paste_window(dst_shape, src_shape, at):
    """Slice pairs aligning a src raster centered at `at` with a dst canvas.

    Returns (dst_ys, dst_xs, src_ys, src_xs) or None when nothing overlaps.
    """
    dh, dw = dst_shape
    sh, sw = src_shape
    x0 = int(at[0]) - sw // 2
    y0 = int(at[1]) - sh // 2
    sx0 = max(0, -x0)
    sy0 = max(0, -y0)
    dx0 = max(0, x0)
    dy0 = max(0, y0)
    cw = min(sw - sx0, dw - dx0)
    ch = min(sh - sy0, dh - dy0)
    if cw <= 0 or ch <= 0:
        return None
    return (
        slice(dy0, dy0 + ch),
        slice(dx0, dx0 + cw),
        slice(sy0, sy0 + ch),
        slice(sx0, sx0 + cw),
    )


def paste(dst_shape, src, at):
    """Paste src centered at `at` onto an empty dst-shaped canvas, clipping
    whatever falls outside; a fully clipped paste yields an empty mask."""
    out = np.zeros(dst_shape, dtype=bool)
    win = paste_window(dst_shape, src.shape, at)
    if win is not None:
        dys, dxs, sys_, sxs = win
        out[dys, dxs] = src[sys_, sxs]
    return out

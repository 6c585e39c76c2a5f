"""DSC, HD95 and relative degradation on binary masks.

Conventions, stated once:
- DSC: both masks empty -> 1.0 (absence predicted perfectly); exactly one
  empty -> 0.0.
- HD95 runs over boundary pixels with a nearest-rank 95th percentile; both
  boundaries empty -> 0.0, exactly one empty -> the image diagonal as a
  finite worst-case sentinel.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.spatial import cKDTree

from .errors import DimensionMismatchError, UndefinedDegradationError
from .mask_utils import boundary_pixels


def _check_same_dims(a, b):
    if a.shape != b.shape:
        raise DimensionMismatchError(f"mask shapes differ: {a.shape} vs {b.shape}")


def dice(pred, target):
    """2|A∩B| / (|A|+|B|), with the empty-mask conventions above."""
    _check_same_dims(pred, target)
    pa = int(np.count_nonzero(pred))
    ta = int(np.count_nonzero(target))
    if pa == 0 and ta == 0:
        return 1.0
    inter = int(np.count_nonzero(pred & target))
    return 2.0 * inter / (pa + ta)


def _p95(dists):
    # nearest-rank: smallest order statistic covering 95% of n, which is the
    # maximum for every n <= 20
    k = (19 * dists.size) // 20
    return float(np.sort(dists)[k])


def hd95(pred, target):
    """Symmetric 95th-percentile Hausdorff distance over boundary pixels."""
    _check_same_dims(pred, target)
    bp = boundary_pixels(pred)
    bt = boundary_pixels(target)
    if bp.size == 0 and bt.size == 0:
        return 0.0
    if bp.size == 0 or bt.size == 0:
        h, w = pred.shape
        return math.sqrt(w * w + h * h)
    bp = bp.astype(np.float64)
    bt = bt.astype(np.float64)
    d_pt = cKDTree(bt).query(bp)[0]
    d_tp = cKDTree(bp).query(bt)[0]
    return max(_p95(d_pt), _p95(d_tp))


def relative_degradation(clean_dsc, occluded_dsc):
    """Percent drop from the clean score; negative when occlusion helps."""
    if clean_dsc <= 0:
        raise UndefinedDegradationError("clean DSC must be positive")
    return (clean_dsc - occluded_dsc) / clean_dsc * 100.0

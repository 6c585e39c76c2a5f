import numpy as np
import pytest


def random_mask(rng, h, w, density=None):
    """Random binary mask; density defaults to a uniform draw in (0.2, 0.8)."""
    if density is None:
        density = rng.uniform(0.2, 0.8)
    return rng.random((h, w)) < density


def random_blob(rng, h, w, r_lo=4, r_hi=None):
    """Random filled ellipse-ish blob, guaranteed non-empty."""
    if r_hi is None:
        r_hi = max(r_lo + 1, min(h, w) // 3)
    cy = rng.uniform(h * 0.3, h * 0.7)
    cx = rng.uniform(w * 0.3, w * 0.7)
    ry = rng.uniform(r_lo, r_hi)
    rx = rng.uniform(r_lo, r_hi)
    yy, xx = np.mgrid[0:h, 0:w]
    m = ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1.0
    if not m.any():
        m[int(cy), int(cx)] = True
    return m


@pytest.fixture
def rng():
    return np.random.default_rng(20260816)

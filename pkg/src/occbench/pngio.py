"""PNG input/output for masks and RGB images.

Masks persist as single-channel 8-bit PNG, 0 = background and 255 =
foreground. Reads binarize at >= 128 so lightly anti-aliased ground truth
still loads cleanly. All writes go through a temp file and an atomic rename,
and carry no timestamps, so identical pixels give identical bytes.
"""

from __future__ import annotations

import os

import numpy as np
from PIL import Image


def _atomic_save(img, path):
    path = os.fspath(path)
    tmp = f"{path}.{os.getpid()}.tmp"
    img.save(tmp, format="PNG")
    os.replace(tmp, path)


def read_mask(path):
    """Load a mask PNG as a 2-D bool array (>= 128 is foreground)."""
    with Image.open(path) as img:
        arr = np.asarray(img.convert("L"))
    return arr >= 128


def write_mask(path, mask):
    arr = np.where(mask, 255, 0).astype(np.uint8)
    _atomic_save(Image.fromarray(arr, mode="L"), path)


def read_image(path):
    """Load an image as (h, w, 3) uint8."""
    with Image.open(path) as img:
        return np.array(img.convert("RGB"))


def write_image(path, arr):
    _atomic_save(Image.fromarray(np.asarray(arr, dtype=np.uint8), mode="RGB"), path)

"""Bin-controlled occlusion synthesis.

Two occluder families, both rejection-sampled into a severity bin measured
by the occlusion ratio r = |target ∩ occluder| / |target|:

- tool paste: a library instrument crop is scaled (0.8-1.0), rotated
  (±45°), and pasted near the target centroid; up to 50 placement attempts,
  accepted when r_min <= r <= r_max. Exhaustion skips the sample.
- cutout: a rectangle sized from a target ratio drawn inside the bin is
  placed near the centroid once, then grown (×1.3) while r is at or below
  the bin floor and shrunk (×0.7) while above the ceiling, up to 50 checks,
  accepted when r_min < r <= r_max. Exhaustion applies the final rectangle
  anyway and flags the sample as out-of-bin. Cutout pixels turn black:
  content is removed, nothing foreign is pasted.

The two acceptance inequalities really are different (closed floor for tool,
open for cutout) and are kept that way on purpose.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import mask_utils as mu
from . import pngio
from .errors import (
    DegenerateTransformError,
    DimensionMismatchError,
    EmptyDatasetError,
    EmptyMaskError,
    GenerationExhaustedError,
)
from .seeds import subseed

K_ATTEMPTS = 50
OCCLUSION_TYPES = ("tool", "cutout")
OCCLUSION_BIN_LABELS = ("low", "medium", "high")


@dataclass(frozen=True)
class SeverityBin:
    label: str
    r_min: float
    r_max: float

    @property
    def is_clean(self):
        return self.label == "clean"

    def contains_closed(self, r):
        return self.r_min <= r <= self.r_max

    def contains_open_floor(self, r):
        return self.r_min < r <= self.r_max


BINS = {
    "clean": SeverityBin("clean", 0.0, 0.0),
    "low": SeverityBin("low", 0.0, 0.2),
    "medium": SeverityBin("medium", 0.2, 0.4),
    "high": SeverityBin("high", 0.4, 0.6),
}


@dataclass
class ToolInstance:
    source_id: str
    rgb: np.ndarray  # (h, w, 3) uint8
    mask: np.ndarray  # (h, w) bool


def load_tool_library(directory):
    """Read <id>_rgb.png / <id>_mask.png pairs, sorted by id."""
    suffix_rgb, suffix_mask = "_rgb.png", "_mask.png"
    ids = sorted(
        name[: -len(suffix_rgb)]
        for name in os.listdir(directory)
        if name.endswith(suffix_rgb)
    )
    tools = []
    for tool_id in ids:
        mask_path = os.path.join(directory, tool_id + suffix_mask)
        if not os.path.isfile(mask_path):
            continue
        rgb = pngio.read_image(os.path.join(directory, tool_id + suffix_rgb))
        mask = pngio.read_mask(mask_path)
        if not mask.any():
            continue
        tools.append(ToolInstance(tool_id, rgb, mask))
    if not tools:
        raise EmptyDatasetError(f"{directory}: no usable tool crops")
    return tools


@dataclass
class OcclusionSample:
    occlusion_type: str  # "tool" | "cutout" | "clean"
    bin: SeverityBin
    image: np.ndarray  # occluded RGB
    occluder: np.ndarray
    full: np.ndarray
    effective: np.ndarray  # full \ occluder
    ratio: float
    seed: int
    attempts_used: int
    out_of_bin: bool = False
    source_id: str = ""
    params: dict = field(default_factory=dict)


def occlusion_ratio(target, occluder):
    """Share of the target hidden by the occluder, |T ∩ O| / |T|."""
    if target.shape != occluder.shape:
        raise DimensionMismatchError(
            f"mask shapes differ: {target.shape} vs {occluder.shape}"
        )
    t_area = int(np.count_nonzero(target))
    if t_area == 0:
        raise EmptyMaskError("occlusion ratio of an empty target")
    return int(np.count_nonzero(target & occluder)) / t_area


def _delta_bounds(target):
    box = mu.bounding_box(target)
    return int(0.25 * box.width), int(0.25 * box.height)


def generate_tool_occlusion(image, target, bin, library, seed, k_attempts=K_ATTEMPTS):
    """Paste a random library tool until the occlusion ratio lands in the bin.

    Draw order per attempt: tool index, scale, rotation, offset. Raises
    GenerationExhaustedError after k_attempts misses.
    """
    if bin.is_clean:
        raise ValueError("tool generation needs a non-clean bin")
    if not library:
        raise ValueError("tool library is empty")
    if image.shape[:2] != target.shape:
        raise DimensionMismatchError(
            f"image {image.shape[:2]} does not match target {target.shape}"
        )
    rng = np.random.default_rng(seed)
    center = mu.centroid(target)  # raises on empty target
    dx_max, dy_max = _delta_bounds(target)

    for attempt in range(1, k_attempts + 1):
        tool = library[int(rng.integers(len(library)))]
        scale = float(rng.uniform(0.8, 1.0))
        rotation = float(rng.uniform(-45.0, 45.0))
        dx = int(rng.integers(-dx_max, dx_max + 1))
        dy = int(rng.integers(-dy_max, dy_max + 1))
        try:
            t_mask, t_rgb = mu.transform_mask_with_image(
                tool.mask, tool.rgb, scale, rotation
            )
        except DegenerateTransformError:
            continue  # burns the attempt
        pos = mu.Point(center.x + dx, center.y + dy)
        occluder = mu.paste(target.shape, t_mask, pos)
        r = occlusion_ratio(target, occluder)
        if bin.contains_closed(r):
            occluded = image.copy()
            win = mu.paste_window(target.shape, t_mask.shape, pos)
            if win is not None:
                dys, dxs, sys_, sxs = win
                patch = occluded[dys, dxs]
                sel = t_mask[sys_, sxs]
                patch[sel] = t_rgb[sys_, sxs][sel]
                occluded[dys, dxs] = patch
            return OcclusionSample(
                occlusion_type="tool",
                bin=bin,
                image=occluded,
                occluder=occluder,
                full=target,
                effective=mu.subtract(target, occluder),
                ratio=r,
                seed=seed,
                attempts_used=attempt,
                params={
                    "tool": tool.source_id,
                    "scale": scale,
                    "rotation": rotation,
                    "position": [pos.x, pos.y],
                },
            )
    raise GenerationExhaustedError(
        f"no tool placement reached bin {bin.label!r} in {k_attempts} attempts",
        attempts_used=k_attempts,
    )


def resize_rect(h, w, grow):
    """One rectangle adjustment step: grow 1.3x or shrink 0.7x."""
    f = 1.3 if grow else 0.7
    return f * h, f * w


def _rect_mask(shape, h, w, center):
    rh = mu.iround(h)
    rw = mu.iround(w)
    out = np.zeros(shape, dtype=bool)
    if rh <= 0 or rw <= 0:
        return out
    y0 = center.y - rh // 2
    x0 = center.x - rw // 2
    ys = slice(max(0, y0), max(0, min(shape[0], y0 + rh)))
    xs = slice(max(0, x0), max(0, min(shape[1], x0 + rw)))
    out[ys, xs] = True
    return out


def generate_cutout_occlusion(image, target, bin, seed, k_attempts=K_ATTEMPTS):
    """Carve a bin-controlled black rectangle out of the image.

    Never raises for exhaustion: the final rectangle is applied regardless
    and the sample carries out_of_bin when its ratio missed the bin.
    """
    if bin.is_clean:
        raise ValueError("cutout generation needs a non-clean bin")
    if image.shape[:2] != target.shape:
        raise DimensionMismatchError(
            f"image {image.shape[:2]} does not match target {target.shape}"
        )
    rng = np.random.default_rng(seed)
    center = mu.centroid(target)  # raises on empty target
    dx_max, dy_max = _delta_bounds(target)

    r_star = float(rng.uniform(bin.r_min, bin.r_max))
    area_mult = float(rng.uniform(1.2, 1.8))
    alpha = float(rng.uniform(0.5, 2.0))
    dx = int(rng.integers(-dx_max, dx_max + 1))
    dy = int(rng.integers(-dy_max, dy_max + 1))

    a_m = mu.area(target)
    a_t = a_m * r_star
    a_c = a_t * area_mult
    h = math.sqrt(a_c / alpha)
    w = a_c / h
    h0, w0 = h, w
    pos = mu.Point(center.x + dx, center.y + dy)

    occluder = _rect_mask(target.shape, h, w, pos)
    r = occlusion_ratio(target, occluder)
    resizes = 0
    accepted = False
    attempts = k_attempts
    for attempt in range(1, k_attempts + 1):
        if bin.contains_open_floor(r):
            accepted = True
            attempts = attempt
            break
        h, w = resize_rect(h, w, grow=r <= bin.r_min)
        resizes += 1
        occluder = _rect_mask(target.shape, h, w, pos)
        r = occlusion_ratio(target, occluder)

    occluded = image.copy()
    occluded[occluder] = 0
    return OcclusionSample(
        occlusion_type="cutout",
        bin=bin,
        image=occluded,
        occluder=occluder,
        full=target,
        effective=mu.subtract(target, occluder),
        ratio=r,
        seed=seed,
        attempts_used=attempts,
        out_of_bin=not (accepted or bin.contains_open_floor(r)),
        params={
            "r_star": r_star,
            "area_mult": area_mult,
            "alpha": alpha,
            "h0": h0,
            "w0": w0,
            "h": h,
            "w": w,
            "resizes": resizes,
            "position": [pos.x, pos.y],
        },
    )


def make_clean_sample(image, target, seed):
    """Pass-through entry: no occluder, ratio 0."""
    if image.shape[:2] != target.shape:
        raise DimensionMismatchError(
            f"image {image.shape[:2]} does not match target {target.shape}"
        )
    if not target.any():
        raise EmptyMaskError("clean sample needs a non-empty target")
    empty = np.zeros_like(target)
    return OcclusionSample(
        occlusion_type="clean",
        bin=BINS["clean"],
        image=image.copy(),
        occluder=empty,
        full=target,
        effective=target.copy(),
        ratio=0.0,
        seed=seed,
        attempts_used=0,
    )


# ------------------------------------------------------------- batch driver

_WORKER_LIBRARY = None


def _init_worker(library):
    global _WORKER_LIBRARY
    _WORKER_LIBRARY = library


def _generate_one(task):
    """One (source, type, bin) cell. Returns (key, sample | None, error)."""
    source_id, image, target, occ_type, bin_label, seed = task
    bin = BINS[bin_label]
    try:
        if occ_type == "clean":
            sample = make_clean_sample(image, target, seed)
        elif occ_type == "tool":
            sample = generate_tool_occlusion(image, target, bin, _WORKER_LIBRARY, seed)
        elif occ_type == "cutout":
            sample = generate_cutout_occlusion(image, target, bin, seed)
        else:
            raise ValueError(f"unknown occlusion type: {occ_type!r}")
    except GenerationExhaustedError as e:
        return (source_id, occ_type, bin_label), None, str(e)
    sample.source_id = source_id
    return (source_id, occ_type, bin_label), sample, None


def generate_dataset(
    sources,
    master_seed,
    library=None,
    types=OCCLUSION_TYPES,
    bin_labels=OCCLUSION_BIN_LABELS,
    workers=0,
    clean=True,
):
    """Run the full (source × type × bin) grid plus clean pass-throughs.

    sources: iterable of (source_id, image, target_mask). Per-sample RNG is
    derived from (master_seed, source_id, type, bin), so results do not
    depend on ordering or worker count. Returns (samples, report); samples
    are sorted by (source_id, type, bin) and skipped cells are only logged.
    """
    tasks = []
    for source_id, image, target in sorted(sources, key=lambda s: s[0]):
        if clean:
            tasks.append(
                (
                    source_id,
                    image,
                    target,
                    "clean",
                    "clean",
                    subseed(master_seed, source_id, "clean", "clean"),
                )
            )
        for occ_type in types:
            if "tool" == occ_type and not library:
                raise ValueError("tool generation requested without a library")
            for bin_label in bin_labels:
                tasks.append(
                    (
                        source_id,
                        image,
                        target,
                        occ_type,
                        bin_label,
                        subseed(master_seed, source_id, occ_type, bin_label),
                    )
                )

    if workers and workers > 1:
        with ProcessPoolExecutor(
            max_workers=workers, initializer=_init_worker, initargs=(library,)
        ) as pool:
            results = list(pool.map(_generate_one, tasks, chunksize=8))
    else:
        _init_worker(library)
        results = [_generate_one(t) for t in tasks]

    samples = []
    counts = {}
    skips = []
    for (source_id, occ_type, bin_label), sample, error in results:
        cell = counts.setdefault(
            (occ_type, bin_label),
            {"attempted": 0, "accepted": 0, "skipped": 0, "out_of_bin": 0},
        )
        cell["attempted"] += 1
        if sample is None:
            cell["skipped"] += 1
            skips.append(
                {"source_id": source_id, "type": occ_type, "bin": bin_label, "reason": error}
            )
            continue
        cell["accepted"] += 1
        if sample.out_of_bin:
            cell["out_of_bin"] += 1
        samples.append(sample)

    samples.sort(key=lambda s: (s.source_id, s.occlusion_type, s.bin.label))
    report = {
        "counts": {f"{t}/{b}": c for (t, b), c in sorted(counts.items())},
        "skips": sorted(skips, key=lambda s: (s["source_id"], s["type"], s["bin"])),
    }
    return samples, report

"""Three-region decomposition and per-mode scoring tests."""

from __future__ import annotations

import numpy as np
import pytest

from occbench import mask_utils as mu
from occbench import protocol
from occbench.errors import DimensionMismatchError, EmptyMaskError

from conftest import random_blob, random_mask


def test_decompose_occluder_empty():
    full = random_blob(np.random.default_rng(0), 16, 16)
    t = protocol.decompose(full, np.zeros_like(full))
    assert np.array_equal(t.visible, full)
    assert mu.area(t.invisible) == 0


def test_decompose_occluder_covers_all():
    full = random_blob(np.random.default_rng(1), 16, 16)
    t = protocol.decompose(full, np.ones_like(full))
    assert mu.area(t.visible) == 0
    assert np.array_equal(t.invisible, full)


def test_decompose_counts():
    full = np.zeros((6, 6), bool)
    full[1:3, 0:5] = True  # area 10
    occ = np.zeros((6, 6), bool)
    occ[1, 0:3] = True  # overlaps 3
    t = protocol.decompose(full, occ)
    assert mu.area(t.visible) == 7
    assert mu.area(t.invisible) == 3


def test_decompose_errors():
    with pytest.raises(DimensionMismatchError):
        protocol.decompose(np.ones((3, 3), bool), np.ones((3, 4), bool))
    with pytest.raises(EmptyMaskError):
        protocol.decompose(np.zeros((3, 3), bool), np.zeros((3, 3), bool))


def test_decompose_identity_random(rng):
    for _ in range(300):
        h, w = rng.integers(2, 20, size=2)
        full = random_mask(rng, h, w)
        if not full.any():
            continue
        occ = random_mask(rng, h, w)
        t = protocol.decompose(full, occ)
        assert not (t.visible & t.invisible).any()
        assert np.array_equal(t.visible | t.invisible, full)
        assert mu.area(t.visible) + mu.area(t.invisible) == mu.area(full)


def test_select_target_modes():
    full = np.zeros((8, 8), bool)
    full[2:6, 2:6] = True
    occ = np.zeros((8, 8), bool)
    occ[2:4, 2:6] = True
    t = protocol.decompose(full, occ)
    assert np.array_equal(protocol.select_target(t, "full"), full)
    assert np.array_equal(protocol.select_target(t, "visible_only"), t.visible)
    assert np.array_equal(protocol.select_target(t, "invisible"), t.invisible)

    clean = protocol.decompose(full, np.zeros_like(full))
    assert protocol.select_target(clean, "invisible") is None
    assert protocol.select_target(clean, "full") is not None

    with pytest.raises(ValueError):
        protocol.select_target(t, "nonsense")


def test_score_mode_visible_predictor():
    # prediction equal to the visible region: perfect in visible mode, zero
    # in invisible mode
    rng = np.random.default_rng(5)
    for _ in range(20):
        full = random_blob(rng, 24, 24)
        occ = random_blob(rng, 24, 24)
        t = protocol.decompose(full, occ)
        if mu.area(t.invisible) == 0 or mu.area(t.visible) == 0:
            continue
        pred = t.visible.copy()
        dsc_vis, hd_vis = protocol.score_mode(pred, t, "visible_only")
        assert dsc_vis == 1.0 and hd_vis == 0.0
        dsc_inv, _ = protocol.score_mode(pred, t, "invisible")
        assert dsc_inv == 0.0


def test_score_mode_full_predictor():
    rng = np.random.default_rng(6)
    full = random_blob(rng, 24, 24)
    occ = random_blob(rng, 24, 24)
    t = protocol.decompose(full, occ)
    dsc, hd = protocol.score_mode(full.copy(), t, "full")
    assert dsc == 1.0 and hd == 0.0


def test_score_mode_invisible_restricts_prediction():
    # a prediction that covers the whole target (hidden part included) is a
    # perfect completion: invisible mode must not punish its visible pixels
    full = np.zeros((10, 10), bool)
    full[2:8, 2:8] = True
    occ = np.zeros((10, 10), bool)
    occ[2:8, 2:5] = True
    t = protocol.decompose(full, occ)
    assert mu.area(t.invisible) > 0
    dsc, hd = protocol.score_mode(full.copy(), t, "invisible")
    assert dsc == 1.0 and hd == 0.0
    # and a visible-only prediction scores zero there
    dsc2, _ = protocol.score_mode(t.visible.copy(), t, "invisible")
    assert dsc2 == 0.0


def test_score_mode_invisible_absent_when_empty():
    full = np.zeros((10, 10), bool)
    full[2:8, 2:8] = True
    t = protocol.decompose(full, np.zeros_like(full))
    assert protocol.score_mode(full.copy(), t, "invisible") is None


def test_occlusion_ratio_equals_invisible_share(rng):
    from occbench.generate import occlusion_ratio

    for _ in range(100):
        full = random_blob(rng, 20, 20)
        occ = random_mask(rng, 20, 20)
        t = protocol.decompose(full, occ)
        r = occlusion_ratio(full, occ)
        assert r == mu.area(t.invisible) / mu.area(full)

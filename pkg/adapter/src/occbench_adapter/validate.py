"""Conformance checks on a prediction directory.

Everything the evaluator assumes about prediction files is checked here:
one file per manifest sample under the pinned naming scheme, grayscale PNG,
dimensions matching the sample, and strictly binary {0, 255} values. The
report is a flat list of human-readable violations; empty means conformant.
"""

from __future__ import annotations

import os

from . import io
from .runner import prediction_name


def validate_output(preds_dir, manifest_path, model_id, prompt_kind):
    _, records = io.read_manifest(manifest_path)
    violations = []

    expected = {}
    for rec in records:
        expected[prediction_name(rec["sample_id"], model_id, prompt_kind)] = rec

    for name in sorted(expected):
        rec = expected[name]
        path = os.path.join(preds_dir, name)
        if not os.path.isfile(path):
            violations.append(f"missing prediction: {name}")
            continue
        try:
            mode, arr = io.read_raw(path)
        except Exception as exc:
            violations.append(f"unreadable prediction: {name}: {exc}")
            continue
        if mode not in ("L", "1"):
            violations.append(f"not grayscale: {name}: mode {mode}")
            continue
        want = (rec["height"], rec["width"])
        if arr.shape != want:
            violations.append(
                f"wrong size: {name}: {arr.shape[1]}x{arr.shape[0]}, "
                f"expected {want[1]}x{want[0]}"
            )
            continue
        stray = sorted(int(v) for v in set(arr.ravel().tolist()) - {0, 255})
        if stray:
            violations.append(f"not binary: {name}: contains value {stray[0]}")

    suffix = f"__{model_id}__{prompt_kind}.png"
    if os.path.isdir(preds_dir):
        for name in sorted(os.listdir(preds_dir)):
            if name.endswith(suffix) and name not in expected:
                violations.append(f"unexpected file: {name}")

    return violations

"""File interchange with the benchmark harness.

The adapter talks to the benchmark exclusively through files: it reads the
run manifest (JSON lines, one header record then one record per sample) and
the target mask PNGs it references, and writes binary prediction PNGs. The
formats are re-implemented here on purpose; this package never imports the
benchmark.
"""

from __future__ import annotations

import json
import os

import numpy as np
from PIL import Image

MANIFEST_KIND = "occbench-manifest"
SCHEMA_VERSION = 1


def read_manifest(path):
    with open(path, encoding="utf-8") as f:
        lines = [line for line in f.read().splitlines() if line]
    if not lines:
        raise ValueError(f"{path}: empty manifest")
    header = json.loads(lines[0])
    if header.get("kind") != MANIFEST_KIND:
        raise ValueError(f"{path}: not a benchmark manifest")
    if header.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(
            f"{path}: unsupported schema_version {header.get('schema_version')!r}"
        )
    return header, [json.loads(line) for line in lines[1:]]


def read_mask(path):
    with Image.open(path) as img:
        arr = np.asarray(img.convert("L"))
    return arr >= 128


def read_raw(path):
    """Image mode and raw pixel array, for conformance checks."""
    with Image.open(path) as img:
        return img.mode, np.asarray(img.convert("L"))


def write_mask(path, mask):
    arr = np.where(mask, 255, 0).astype(np.uint8)
    tmp = f"{path}.{os.getpid()}.tmp"
    Image.fromarray(arr, mode="L").save(tmp, format="PNG")
    os.replace(tmp, path)


def write_jsonl(path, rows):
    tmp = f"{path}.{os.getpid()}.tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        for row in rows:
            f.write(json.dumps(row, sort_keys=True, separators=(",", ":")) + "\n")
    os.replace(tmp, path)

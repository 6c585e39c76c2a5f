"""Run manifest persistence.

A manifest is JSON-lines: one header record, then one record per sample,
sorted by sample id. File paths inside records are relative to the manifest's
directory, and writes are atomic (temp file + rename), so a regenerated run
is byte-identical wherever it lives.
"""

from __future__ import annotations

import json
import os

SCHEMA_VERSION = 1
KIND = "occbench-manifest"


def atomic_write_text(path, text):
    path = os.fspath(path)
    tmp = f"{path}.{os.getpid()}.tmp"
    with open(tmp, "w", encoding="utf-8") as f:
        f.write(text)
    os.replace(tmp, path)


def dumps(obj):
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def write_manifest(path, header, records):
    head = {"kind": KIND, "schema_version": SCHEMA_VERSION, **header}
    lines = [dumps(head)]
    lines.extend(dumps(r) for r in records)
    atomic_write_text(path, "\n".join(lines) + "\n")


def read_manifest(path):
    with open(path, encoding="utf-8") as f:
        lines = [line for line in f.read().splitlines() if line]
    if not lines:
        raise ValueError(f"{path}: empty manifest")
    header = json.loads(lines[0])
    if header.get("kind") != KIND:
        raise ValueError(f"{path}: not a manifest (kind={header.get('kind')!r})")
    if header.get("schema_version") != SCHEMA_VERSION:
        raise ValueError(
            f"{path}: schema_version {header.get('schema_version')!r} unsupported"
        )
    records = [json.loads(line) for line in lines[1:]]
    return header, records

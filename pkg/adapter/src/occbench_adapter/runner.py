"""Batch prediction over one manifest."""

from __future__ import annotations

import os
import time
from dataclasses import dataclass

from . import io
from .backends import resolve_backend

PROMPT_KINDS = ("point", "box")
LOG_NAME = "adapter_log.jsonl"


@dataclass(frozen=True)
class AdapterJob:
    manifest: str
    model: str
    prompt: str
    out: str
    device: str = "cpu"
    batch_size: int = 1

    def __post_init__(self):
        if self.prompt not in PROMPT_KINDS:
            raise ValueError(f"prompt kind must be one of {PROMPT_KINDS}")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


def prediction_name(sample_id, model_id, prompt_kind):
    return f"{sample_id}__{model_id}__{prompt_kind}.png"


def run_adapter(job):
    """Predict every manifest sample, write PNGs plus a run log.

    A backend that cannot load is fatal. A single sample failing is not:
    it is logged and skipped so a long batch survives isolated bad files.
    Returns {"predicted", "failed", "log"}.
    """
    backend = resolve_backend(job.model).load(job.device)
    base_dir = os.path.dirname(os.path.abspath(job.manifest))
    header, records = io.read_manifest(job.manifest)
    os.makedirs(job.out, exist_ok=True)

    entries = [
        {
            "kind": "adapter-run",
            "manifest": os.path.abspath(job.manifest),
            "dataset": header.get("dataset"),
            "model": job.model,
            "prompt": job.prompt,
            "device": job.device,
            "batch_size": job.batch_size,
            "n_samples": len(records),
        }
    ]
    predicted = failed = 0
    for rec in records:
        name = prediction_name(rec["sample_id"], job.model, job.prompt)
        t0 = time.perf_counter()
        try:
            mask = backend.predict(rec, base_dir, job.prompt)
            io.write_mask(os.path.join(job.out, name), mask)
        except Exception as exc:
            failed += 1
            entries.append(
                {
                    "sample_id": rec["sample_id"],
                    "file": None,
                    "ms": round((time.perf_counter() - t0) * 1000.0, 3),
                    "error": str(exc),
                }
            )
            continue
        predicted += 1
        entries.append(
            {
                "sample_id": rec["sample_id"],
                "file": name,
                "ms": round((time.perf_counter() - t0) * 1000.0, 3),
                "error": None,
            }
        )

    log_path = os.path.join(job.out, LOG_NAME)
    io.write_jsonl(log_path, entries)
    return {"predicted": predicted, "failed": failed, "log": log_path}

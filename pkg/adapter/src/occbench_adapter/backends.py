"""Model backends.

`mock` is the only backend that runs everywhere: it answers with the
sample's visible target region (complete target minus occluder), computed
from the manifest's stored masks. It exists so the full benchmark loop can
be driven and regression-tested without any checkpoint, and its output is
bit-deterministic.

The real checkpoint ids resolve but refuse to load unless their released
runtime is installed; there is deliberately no re-implementation of any of
them here.
"""

from __future__ import annotations

import os

from . import io

CHECKPOINT_MODELS = (
    "SAM",
    "SAM2",
    "SAM3",
    "MedSAM",
    "SAM-Med2D",
    "MedSAM2",
    "MedSAM3",
)


class BackendLoadError(Exception):
    pass


class MockBackend:
    """Deterministic stand-in: predicts the visible target region."""

    name = "mock"

    def load(self, device):
        return self

    def predict(self, record, base_dir, prompt_kind):
        full = io.read_mask(os.path.join(base_dir, record["files"]["full"]))
        occluder = io.read_mask(os.path.join(base_dir, record["files"]["occluder"]))
        return full & ~occluder


class CheckpointBackend:
    """Placeholder for a released checkpoint; loading is environment-bound."""

    def __init__(self, model_id):
        self.name = model_id

    def load(self, device):
        raise BackendLoadError(
            f"model {self.name!r}: released checkpoint and runtime not available "
            f"in this environment (only 'mock' runs without them)"
        )

    def predict(self, record, base_dir, prompt_kind):  # pragma: no cover
        raise BackendLoadError(f"model {self.name!r} was never loaded")


def resolve_backend(model_id):
    if model_id == "mock":
        return MockBackend()
    if model_id in CHECKPOINT_MODELS:
        return CheckpointBackend(model_id)
    raise BackendLoadError(f"unknown model id {model_id!r}")

"""File-protocol bridge between benchmark manifests and segmentation models."""

from .backends import CHECKPOINT_MODELS, BackendLoadError, resolve_backend
from .runner import AdapterJob, prediction_name, run_adapter
from .validate import validate_output

__version__ = "0.1.0"

__all__ = [
    "AdapterJob",
    "BackendLoadError",
    "CHECKPOINT_MODELS",
    "prediction_name",
    "resolve_backend",
    "run_adapter",
    "validate_output",
    "__version__",
]

"""Counter-style seed derivation.

Every randomized step gets its own generator, keyed by the master seed plus
the identifiers of the thing being generated. Sample order and worker count
then cannot change any outcome.
"""

from __future__ import annotations

import hashlib

import numpy as np


def subseed(*parts):
    """Derive a 64-bit seed from the given parts (joined with '|')."""
    key = "|".join(str(p) for p in parts)
    digest = hashlib.sha256(key.encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def rng_for(*parts):
    return np.random.default_rng(subseed(*parts))

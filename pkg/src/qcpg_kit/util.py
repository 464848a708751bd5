"""Small shared helpers: deterministic RNG derivation and thread budget."""

from __future__ import annotations

import hashlib
import os

import numpy as np

THREADS_ENV_VAR = "QCPG_KIT_THREADS"


def _as_entropy(part) -> int:
    if isinstance(part, (int, np.integer)):
        return int(part) & 0xFFFFFFFFFFFFFFFF
    digest = hashlib.sha256(str(part).encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def rng_for(seed: int, *parts) -> np.random.Generator:
    """Derive an independent counter-based generator from the root seed.

    Each distinct ``(seed, *parts)`` tuple yields its own stream, so
    subsystems can draw randomness in any order (or in parallel) without
    affecting one another. Strings are hashed with SHA-256, not Python's
    salted ``hash``, so streams are stable across processes.
    """
    entropy = [_as_entropy(seed)] + [_as_entropy(p) for p in parts]
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(entropy)))


def thread_budget(requested: int | None = None) -> int:
    """Resolve the worker count, honoring the QCPG_KIT_THREADS cap."""
    cap = os.environ.get(THREADS_ENV_VAR)
    limit = None
    if cap is not None:
        try:
            limit = max(1, int(cap))
        except ValueError:
            limit = None
    n = requested if requested is not None else (limit or 1)
    if limit is not None:
        n = min(n, limit)
    return max(1, n)

"""Per-replicate random streams.

Every replicate draws from its own Philox generator keyed by hashing
``(seed, domain, index)`` through :class:`numpy.random.SeedSequence`, so
results never depend on the order in which replicates are executed.
"""

from __future__ import annotations

import os

import numpy as np

# keeps bootstrap resamples and Monte-Carlo draws on disjoint streams
BOOTSTRAP = 0
SIMULATION = 1

SEED_ENV = "SGINI_SEED"
DEFAULT_SEED = 20240101


def stream(seed: int, index: int, domain: int = BOOTSTRAP) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), domain, int(index)])))


def check_seed(seed) -> int:
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return seed


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    return check_seed(raw) if raw not in (None, "") else DEFAULT_SEED


def open_uniform(rng: np.random.Generator, size) -> np.ndarray:
    """Uniforms on the open interval (0, 1): 53-bit grid shifted by half a step."""
    return (rng.integers(0, 2**53, size=size, dtype=np.int64) + 0.5) * 2.0**-53

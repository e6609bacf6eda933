"""Seeded random streams.

Every stream is Philox keyed by a SeedSequence over (master seed, stream id),
so results do not depend on how trials are scheduled.
"""
from __future__ import annotations

import os

import numpy as np

__all__ = ["resolve_seed", "stream", "sample_letters"]

DEFAULT_SEED = 20240601


def resolve_seed(seed: int | None) -> int:
    """Explicit seed, else BOXBALL_SEED, else a fixed default."""
    if seed is not None:
        return int(seed)
    env = os.environ.get("BOXBALL_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"BOXBALL_SEED={env!r} is not an integer") from None
    return DEFAULT_SEED


def stream(seed: int | None, *key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([resolve_seed(seed), *key])))


def sample_letters(rng: np.random.Generator, p, size) -> np.ndarray:
    """i.i.d. letters 0..kappa with probabilities ``p`` as a small-int array."""
    cum = np.cumsum(np.asarray([float(v) for v in p]))
    cum[-1] = 1.0
    return np.searchsorted(cum, rng.random(size), side="right").astype(np.int8)

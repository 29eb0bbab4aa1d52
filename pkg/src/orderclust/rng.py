"""Seeded, counter-based random streams.

Every stream is a Philox generator keyed by a seed sequence built from a
master seed plus stream indices, so sample ``i`` of a batch draws the same
numbers no matter how many samples run before it or in parallel.
"""

from __future__ import annotations

import numpy as np


def make_rng(seed: int, *stream: int) -> np.random.Generator:
    ss = np.random.SeedSequence([int(seed), *(int(s) for s in stream)])
    return np.random.Generator(np.random.Philox(ss))


def as_rng(rng) -> np.random.Generator:
    """Accept a Generator, an int seed or None."""
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        return np.random.Generator(np.random.Philox())
    return make_rng(int(rng))

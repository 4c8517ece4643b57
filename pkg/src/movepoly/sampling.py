"""Seeded uniform sampling inside Euclidean balls.

All randomized estimates in this package draw through these helpers from a
``numpy.random.default_rng`` seeded by the caller, which makes every report
reproducible bit for bit for a given seed.
"""

from __future__ import annotations

import numpy as np


def sample_ball(rng: np.random.Generator, center, radius: float) -> np.ndarray:
    """One point drawn uniformly from the open ball around ``center``.

    Rejection from the enclosing cube; the acceptance rate is fine at the
    low dimensions used here.
    """
    center = np.asarray(center, dtype=float)
    if not radius > 0:
        raise ValueError("radius must be positive")
    while True:
        u = rng.uniform(-1.0, 1.0, size=center.shape[0])
        if float(u @ u) < 1.0:
            return center + radius * u


def sample_balls(rng: np.random.Generator, center, radius: float,
                 count: int) -> np.ndarray:
    """``count`` independent uniform draws from one ball, as rows."""
    return np.array([sample_ball(rng, center, radius) for _ in range(count)])

"""Shared numerical tolerance.

All rank and definiteness decisions compare singular values or eigenvalues
against ``tol * largest`` for the matrix at hand. The default can be
overridden with the ``HR_TOL`` environment variable.
"""

import os

import numpy as np

DEFAULT_TOL = 1e-8


def get_tol(tol: float | None = None) -> float:
    if tol is not None:
        if not tol > 0:
            raise ValueError(f"tolerance must be positive, got {tol}")
        return float(tol)
    env = os.environ.get("HR_TOL")
    if env:
        value = float(env)
        if not value > 0:
            raise ValueError(f"HR_TOL must be positive, got {env}")
        return value
    return DEFAULT_TOL


def make_rng(seed: int, stream: int | tuple[int, ...] | None = None):
    """Counter-based Philox generator; ``stream`` selects an independent substream."""
    if stream is None:
        key = ()
    elif isinstance(stream, tuple):
        key = tuple(int(s) for s in stream)
    else:
        key = (int(stream),)
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(int(seed), spawn_key=key)))

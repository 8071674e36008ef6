"""Seeded synthetic tensors for experiments and tests."""

from __future__ import annotations

import numpy as np

from .algebra import t_product
from .errors import DimensionError, InfeasibleError


def random_low_tubal_rank(dims, rank: int, seed: int) -> np.ndarray:
    """Product of two standard-normal factor tensors with inner extent
    ``rank``, giving tubal rank ``rank`` almost surely.

    Deterministic for a given seed; ``rank == 0`` yields the zero tensor.
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) < 3:
        raise DimensionError(f"need order >= 3, got dims {dims}")
    if min(dims) < 1:
        raise DimensionError(f"extents must be >= 1, got {dims}")
    n1, n2 = dims[:2]
    trailing = dims[2:]
    if not 0 <= rank <= min(n1, n2):
        raise InfeasibleError(
            f"tubal rank {rank} infeasible for dims {dims}; must lie in [0, {min(n1, n2)}]"
        )
    if rank == 0:
        return np.zeros(dims)
    rng = np.random.default_rng(seed)
    left = rng.standard_normal((n1, rank) + trailing)
    right = rng.standard_normal((rank, n2) + trailing)
    return t_product(left, right)

"""Random pure-state models for property checks and benchmarks."""
import math

import numpy as np

from .model import OrthonormalFrame


def random_frame(rng: np.random.Generator, d: int, r: int, scale: float = 1.0) -> OrthonormalFrame:
    """Frame with a generic rank-r derivative block; feasible when 2r >= d."""
    if not 1 <= r <= d:
        raise ValueError("need 1 <= r <= d")
    A = np.zeros((d + 1, r + 1), dtype=complex)
    A[0, 0] = 1.0
    A[1:, 0] = scale * (rng.standard_normal(d) + 1j * rng.standard_normal(d))
    A[1:, 1:] = scale * (rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))) / math.sqrt(2)
    return OrthonormalFrame(A)


def random_feasible_shape(rng: np.random.Generator, d_max: int = 4):
    d = int(rng.integers(1, d_max + 1))
    r = int(rng.integers(math.ceil(d / 2), d + 1))
    return d, r

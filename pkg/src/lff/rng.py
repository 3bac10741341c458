"""Seeded random test functions.

``SplitMix64`` is the 64-bit generator of Steele, Lea and Flood: a Weyl
sequence with increment 0x9E3779B97F4A7C15 followed by a two-round
xor-shift-multiply finaliser.  Uniform floats use the top 53 bits.  Being a
dozen lines of integer arithmetic, it reproduces bit for bit in any
language, which numpy's generators do not promise across versions.
"""

from __future__ import annotations

import numpy as np

from .field import FieldParams
from .funcspace import StepFunction, norm, project_mean_zero

_MASK = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int = 0):
        self.state = seed & _MASK

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
        return z ^ (z >> 31)

    def uniform(self) -> float:
        """Uniform on [0, 1)."""
        return (self.next_u64() >> 11) * 2.0**-53

    def uniform_array(self, n: int, lo: float = -1.0, hi: float = 1.0) -> np.ndarray:
        return np.array([lo + (hi - lo) * self.uniform() for _ in range(n)])


def random_step_function(params: FieldParams, M: int, N: int, rng: SplitMix64) -> StepFunction:
    """Values uniform on [-1, 1]^2 (real part drawn before imaginary part, cell by cell)."""
    raw = rng.uniform_array(2 * params.q ** (M + N))
    return StepFunction(params, M, N, raw[0::2] + 1j * raw[1::2])


def random_mean_zero(params: FieldParams, M: int, N: int, rng: SplitMix64) -> StepFunction:
    """Unit-norm mean-zero step function at level (M, N)."""
    f = project_mean_zero(random_step_function(params, M, N, rng))
    return f * (1 / norm(f))

"""Fourier transform of step functions on K and Fourier coefficients on D.

For f at level (M, N) the transform lives at level (N, M).  With
D = M + N digits, the pairing of frequency cell m and space cell n is

    chi(t**M u(m) * t**N u(n)) = exp(2 pi i/p * sum_i L(m_i * n_{D-1-i}))

where L reads the eps_0 coordinate.  The kernel factors into one q-point
transform per digit, which is what the fast path exploits.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import DomainError
from .field import FieldParams, chi, u_of
from .funcspace import StepFunction, _digits, cell_rep


@lru_cache(maxsize=None)
def _kernel(params: FieldParams) -> np.ndarray:
    """W[a, b] = chi index exponent for the digit pair (a, b) as a unit complex."""
    idx = params.mul_table % params.p
    return np.exp(2j * np.pi * idx / params.p)


def _character_index(params: FieldParams, D: int, rows: np.ndarray) -> np.ndarray:
    q, p = params.q, params.p
    dig = _digits(q, D)
    acc = np.zeros((rows.size, q**D), dtype=np.int64)
    for i in range(D):
        acc += params.mul_table[dig[i][rows][:, None], dig[D - 1 - i][None, :]] % p
    return acc % p


def _apply_direct(params: FieldParams, D: int, vals: np.ndarray, sign: int, block: int = 256) -> np.ndarray:
    p = params.p
    size = params.q**D
    out = np.empty(size, dtype=np.complex128)
    for start in range(0, size, block):
        rows = np.arange(start, min(start + block, size))
        kern = np.exp(sign * 2j * np.pi * _character_index(params, D, rows) / p)
        out[rows] = kern @ vals
    return out


def _apply_fast(params: FieldParams, D: int, vals: np.ndarray, sign: int) -> np.ndarray:
    if D == 0:
        return vals.copy()
    q = params.q
    W = _kernel(params)
    if sign < 0:
        W = W.conj()
    T = vals.reshape((q,) * D)
    for axis in range(D):
        T = np.moveaxis(np.tensordot(W, T, axes=([1], [axis])), 0, axis)
    return T.transpose(tuple(reversed(range(D)))).reshape(-1)


def ft(f: StepFunction, direction: str = "forward", method: str = "fast") -> StepFunction:
    """Fourier transform (``forward``) or its inverse (``inverse``).

    ``method`` is ``"fast"`` (per-digit factorisation) or ``"direct"``
    (full character-sum matrix).
    """
    if direction not in ("forward", "inverse"):
        raise ValueError(f"unknown direction {direction!r}")
    apply = {"fast": _apply_fast, "direct": _apply_direct}[method]
    sign = -1 if direction == "forward" else 1
    out = apply(f.params, f.M + f.N, f.values, sign) * float(f.q) ** (-f.N)
    return StepFunction(f.params, f.N, f.M, out)


def character_on_D(params: FieldParams, n: int, N: int) -> StepFunction:
    """chi_n = chi(u(n) x) restricted to D, at resolution N (needs n < q**N)."""
    if n >= params.q**N:
        raise DomainError(f"chi_{n} is not constant on P^{N} cells")
    un = u_of(params, n)
    p = params.p
    vals = [np.exp(2j * np.pi * chi(un * cell_rep(params, 0, N, c)) / p) for c in range(params.q**N)]
    return StepFunction(params, 0, N, vals)


def fourier_coefficient_on_D(f: StepFunction, n: int) -> complex:
    """<f, chi_n> on D for f supported in D."""
    if f.M != 0:
        raise DomainError(f"f must be supported in D (M = 0), got M={f.M}")
    if n < 0:
        raise DomainError(f"n must be nonnegative, got {n}")
    if n >= f.q**f.N:
        return 0j
    un = u_of(f.params, n)
    p = f.params.p
    total = 0j
    for c in range(f.values.size):
        total += f.values[c] * np.exp(-2j * np.pi * chi(un * cell_rep(f.params, 0, f.N, c)) / p)
    return total * float(f.q) ** (-f.N)

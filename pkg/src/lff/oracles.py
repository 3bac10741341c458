"""Brute-force reference computations, independent of the grid machinery.

Coefficients are evaluated point by point through field arithmetic: each
cell representative x is pushed through t^-j x - u(k) (or t^-j (x - u(k)))
as a FieldElement and the generator is read off at the resulting point.
Values are exact rationals, so "is this coefficient zero" has a
definite answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .field import FieldElement, FieldParams, u_of
from .funcspace import SystemElementIndex, SystemKind, cell_rep


@dataclass(frozen=True)
class ExactStep:
    """A real step function with rational values at level (M, N)."""

    params: FieldParams
    M: int
    N: int
    values: tuple[Fraction, ...]

    def __post_init__(self):
        if len(self.values) != self.params.q ** (self.M + self.N):
            raise ValueError("value count does not match level")

    def __call__(self, x: FieldElement) -> Fraction:
        q = self.params.q
        n = 0
        for e, a in x.terms.items():
            if e < -self.M:
                return Fraction(0)
            if e < self.N:
                n += a * q ** (self.N - 1 - e)
        return self.values[n]

    def resolution(self) -> int:
        return self.N

    def to_floats(self) -> list[float]:
        return [float(v) for v in self.values]


@dataclass(frozen=True)
class ExactCoefficient:
    """<f, eta> = value * q**(half_power / 2)."""

    value: Fraction
    half_power: int

    def __float__(self) -> float:
        return 0.0 if self.value == 0 else float(self.value)

    def as_float(self, q: int) -> float:
        return float(self.value) * float(q) ** (self.half_power / 2)


def exact_coefficient(
    generators: Sequence[ExactStep],
    idx: SystemElementIndex,
    kind: SystemKind,
    f: ExactStep,
    weight: Fraction = Fraction(1),
) -> ExactCoefficient:
    """<f, eta_idx> summed over every cell of supp f at a resolution where both are constant."""
    params = f.params
    q = params.q
    psi = generators[idx.l - 1]
    j, k = idx.j, idx.k
    uk = u_of(params, k)
    shrink = FieldElement.monomial(params, -j, 1)  # t^-j
    if kind is SystemKind.AFFINE or (kind is SystemKind.QUASI_AFFINE and j >= 0):
        scale, half = Fraction(1), j
        point = lambda x: shrink * x - uk
    elif kind is SystemKind.QUASI_AFFINE:
        scale, half = Fraction(q) ** j, 0
        point = lambda x: shrink * (x - uk)
    else:
        scale, half = weight, j
        point = lambda x: shrink * (x - uk)
    N = max(f.N, psi.N + j, 0)
    total = Fraction(0)
    for n in range(q ** (f.M + N)):
        x = cell_rep(params, f.M, N, n)
        fx = f(x)
        if fx:
            total += fx * psi(point(x))
    return ExactCoefficient(total * scale / Fraction(q) ** N, half)


def exact_inner(f: ExactStep, g: ExactStep) -> Fraction:
    M, N = max(f.M, g.M), max(f.N, g.N)
    q = f.params.q
    total = Fraction(0)
    for n in range(q ** (M + N)):
        x = cell_rep(f.params, M, N, n)
        total += f(x) * g(x)
    return total / Fraction(q) ** N

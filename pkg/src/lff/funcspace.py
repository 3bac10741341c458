"""Step functions on K and the operators acting on them.

A :class:`StepFunction` at level ``(M, N)`` is supported in P^-M and
constant on cosets of P^N.  Entry ``n`` of ``values`` is its value on the
cell ``t**N * u(n) + P^N``.  Base-q digit ``i`` of ``n`` is therefore the
coefficient of ``t**(N-1-i)``, so

* enlarging ``M`` appends zeros (new high digits),
* refining ``N`` by one repeats every value ``q`` times (new low digit),
* translation by a grid point is a digitwise GF(q) subtraction on indices,
* dilation only relabels ``(M, N)`` and rescales.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, NamedTuple, Sequence

import numpy as np

from .errors import DomainError, ParameterError, PreconditionError
from .field import FieldElement, FieldParams, index_in_lambda, u_of


class SystemKind(str, enum.Enum):
    AFFINE = "affine"
    QUASI_AFFINE = "quasiAffine"
    CO_AFFINE = "coAffine"


class SystemElementIndex(NamedTuple):
    """Index (l, j, k) of an element; ``l`` is 1-based."""

    l: int
    j: int
    k: int


@lru_cache(maxsize=None)
def _digits(q: int, D: int) -> np.ndarray:
    """Row i holds base-q digit i of every index in [0, q**D)."""
    n = np.arange(q**D, dtype=np.int64)
    out = np.empty((D, q**D), dtype=np.int64)
    for i in range(D):
        out[i] = (n // q**i) % q
    out.setflags(write=False)
    return out


def _from_digits(digits: np.ndarray, q: int) -> np.ndarray:
    weights = q ** np.arange(digits.shape[0], dtype=np.int64)
    return weights @ digits


def digits_of(n: int, q: int, D: int) -> list[int]:
    return [(n // q**i) % q for i in range(D)]


def digitwise_sub(params: FieldParams, D: int, m: int) -> np.ndarray:
    """Indices n (-) m for all n < q**D, digit by digit in GF(q)."""
    q = params.q
    dig = _digits(q, D)
    dm = np.array(digits_of(m, q, D), dtype=np.int64)[:, None]
    return _from_digits(params.sub_table[dig, dm], q)


class StepFunction:
    """A complex step function supported in P^-M, constant on P^N cosets."""

    __slots__ = ("params", "M", "N", "values")

    def __init__(self, params: FieldParams, M: int, N: int, values):
        if M < 0 or N < 0:
            raise DomainError(f"levels must be nonnegative, got (M, N)=({M}, {N})")
        vals = np.array(values, dtype=np.complex128).reshape(-1)
        if vals.size != params.q ** (M + N):
            raise DomainError(f"expected {params.q ** (M + N)} values for (M, N)=({M}, {N}), got {vals.size}")
        vals.setflags(write=False)
        self.params, self.M, self.N, self.values = params, M, N, vals

    def __repr__(self) -> str:
        return f"StepFunction(q={self.params.q}, M={self.M}, N={self.N})"

    @property
    def q(self) -> int:
        return self.params.q

    @classmethod
    def indicator_ball(cls, params: FieldParams, k: int, M: int | None = None, N: int | None = None) -> "StepFunction":
        """1 on P^k, built at level (max(-k, 0), max(k, 0)) unless given."""
        M = max(-k, 0) if M is None else M
        N = max(k, 0) if N is None else N
        if M < -k or N < k:
            raise DomainError(f"P^{k} is not a union of cells at level ({M}, {N})")
        vals = np.zeros(params.q ** (M + N), dtype=np.complex128)
        vals[: params.q ** (N - k)] = 1.0
        return cls(params, M, N, vals)

    @classmethod
    def zero(cls, params: FieldParams, M: int = 0, N: int = 0) -> "StepFunction":
        return cls(params, M, N, np.zeros(params.q ** (M + N)))

    def with_values(self, values) -> "StepFunction":
        return StepFunction(self.params, self.M, self.N, values)

    def __add__(self, other: "StepFunction") -> "StepFunction":
        a, b = common_refinement(self, other)
        return a.with_values(a.values + b.values)

    def __sub__(self, other: "StepFunction") -> "StepFunction":
        a, b = common_refinement(self, other)
        return a.with_values(a.values - b.values)

    def __mul__(self, scalar: complex) -> "StepFunction":
        return self.with_values(self.values * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "StepFunction":
        return self.with_values(-self.values)

    def equals(self, other: "StepFunction", tol: float = 0.0) -> bool:
        """Agreement after embedding into the common refinement."""
        a, b = common_refinement(self, other)
        if tol == 0.0:
            return bool(np.array_equal(a.values, b.values))
        return bool(np.max(np.abs(a.values - b.values), initial=0.0) <= tol)

    def __eq__(self, other) -> bool:
        if not isinstance(other, StepFunction):
            return NotImplemented
        return self.params == other.params and self.equals(other)

    __hash__ = None

    def embed(self, M: int, N: int) -> "StepFunction":
        if M < self.M or N < self.N:
            raise DomainError(f"cannot embed level ({self.M}, {self.N}) into coarser ({M}, {N})")
        q = self.q
        vals = np.repeat(self.values, q ** (N - self.N))
        out = np.zeros(q ** (M + N), dtype=np.complex128)
        out[: vals.size] = vals
        return StepFunction(self.params, M, N, out)

    def __call__(self, x: FieldElement) -> complex:
        """Pointwise value f(x), computed from the digits of x."""
        n = 0
        for e, a in x.terms.items():
            if e < -self.M:
                return 0j
            if e < self.N:
                n += a * self.q ** (self.N - 1 - e)
        return complex(self.values[n])

    def to_json(self) -> dict:
        return {
            **self.params.to_json(),
            "M": self.M,
            "N": self.N,
            "values": [[float(v.real), float(v.imag)] for v in self.values],
        }


def _check_params(f: StepFunction, g: StepFunction):
    if f.params != g.params:
        raise ParameterError(f"mismatched field parameters: {f.params} vs {g.params}")


def common_refinement(*fs: StepFunction) -> list[StepFunction]:
    for g in fs[1:]:
        _check_params(fs[0], g)
    M = max(f.M for f in fs)
    N = max(f.N for f in fs)
    return [f.embed(M, N) for f in fs]


def cell_rep(params: FieldParams, M: int, N: int, n: int) -> FieldElement:
    if not 0 <= n < params.q ** (M + N):
        raise DomainError(f"cell index {n} outside [0, {params.q ** (M + N)})")
    return u_of(params, n).shift(N)


def inner_product(f: StepFunction, g: StepFunction) -> complex:
    """<f, g>, conjugate-linear in g."""
    a, b = common_refinement(f, g)
    return complex(np.vdot(b.values, a.values)) * float(a.q) ** (-a.N)


def norm(f: StepFunction) -> float:
    return float(np.sqrt(np.vdot(f.values, f.values).real * float(f.q) ** (-f.N)))


def integral(f: StepFunction) -> complex:
    return complex(np.sum(f.values)) * float(f.q) ** (-f.N)


def translate(f: StepFunction, y: FieldElement) -> StepFunction:
    """tau_y f(x) = f(x - y).

    Components of y in P^N act trivially (f is constant on P^N cosets) and
    are dropped; the support level grows to contain supp f + y.
    """
    if y.params != f.params:
        raise ParameterError(f"mismatched field parameters: {f.params} vs {y.params}")
    coarse = FieldElement(f.params, {e: a for e, a in y.terms.items() if e < f.N})
    if coarse.is_zero():
        return f
    M = max(f.M, -coarse.valuation)
    g = f.embed(M, f.N)
    m = index_in_lambda(coarse.shift(-f.N))
    return g.with_values(g.values[digitwise_sub(f.params, M + f.N, m)])


def dilate(f: StepFunction, j: int) -> StepFunction:
    """delta_j f(x) = q**(j/2) f(t**-j x); level (M, N) -> (M - j, N + j)."""
    if j == 0:
        return f
    g = f.embed(max(f.M, j), max(f.N, -j))
    return StepFunction(f.params, g.M - j, g.N + j, g.values * float(f.q) ** (j / 2))


def project_mean_zero(f: StepFunction) -> StepFunction:
    """Subtract the mean of f over its support window P^-M."""
    mean = np.sum(f.values) / f.values.size
    if mean == 0:
        return f
    return f.with_values(f.values - mean)


class Window(NamedTuple):
    """Tight geometry of a step function.

    ball: smallest m with supp f inside P^-m.
    radius: smallest m with supp f inside one coset of P^-m.
    resolution: smallest n with f constant on cosets of P^n.
    Levels may be negative.  ``zero`` flags the zero function.
    """

    ball: int
    radius: int
    resolution: int
    zero: bool = False


def window(f: StepFunction) -> Window:
    """Tight window from exact value comparisons (conservative under rounding)."""
    q, M, N = f.q, f.M, f.N
    nz = np.flatnonzero(f.values)
    if nz.size == 0:
        return Window(-N, -N, -M, zero=True)
    top = int(nz[-1])
    ndig = 0
    while q**ndig <= top:
        ndig += 1
    ball = ndig - N
    radius = ball
    while radius > -N and np.all(nz // q ** (N + radius - 1) == nz[0] // q ** (N + radius - 1)):
        radius -= 1
    resolution = N
    while resolution > -M:
        blocks = f.values.reshape(-1, q ** (N - resolution + 1))
        if not np.all(blocks == blocks[:, :1]):
            break
        resolution -= 1
    return Window(ball, radius, resolution)


def union_window(*ws: Window) -> Window:
    live = [w for w in ws if not w.zero]
    if not live:
        return ws[0]
    return Window(
        max(w.ball for w in live),
        max(w.radius for w in live),
        max(w.resolution for w in live),
    )


def project_to_grid(f: StepFunction, M: int, N: int) -> np.ndarray:
    """Cell averages of f on the level-(M, N) cells of P^-M."""
    q = f.q
    vals = f.values
    if f.M > M:
        vals = vals[: q ** (M + f.N)]
    elif f.M < M:
        vals = np.concatenate([vals, np.zeros(q ** (M + f.N) - vals.size, dtype=vals.dtype)])
    if f.N > N:
        vals = vals.reshape(-1, q ** (f.N - N)).mean(axis=1)
    elif f.N < N:
        vals = np.repeat(vals, q ** (N - f.N))
    return vals


@dataclass(frozen=True)
class CoaffineWeights:
    """Weights c_{l,j}: explicit entries, falling back to ``default``."""

    table: Mapping[tuple[int, int], complex] = field(default_factory=dict)
    default: complex | None = None

    @classmethod
    def constant(cls, value: complex) -> "CoaffineWeights":
        return cls({}, complex(value))

    def __call__(self, l: int, j: int) -> complex:
        try:
            return complex(self.table[(l, j)])
        except KeyError:
            if self.default is None:
                raise PreconditionError(f"no co-affine weight defined for (l, j)=({l}, {j})") from None
            return self.default


def system_element(
    generators: Sequence[StepFunction],
    idx: SystemElementIndex,
    kind: SystemKind | str = SystemKind.AFFINE,
    weights: CoaffineWeights | None = None,
) -> StepFunction:
    """psi^l_{j,k} (affine), its quasi-affine or weighted co-affine variant."""
    kind = SystemKind(kind)
    l, j, k = idx
    if not 1 <= l <= len(generators):
        raise DomainError(f"generator index l={l} outside [1, {len(generators)}]")
    if k < 0:
        raise DomainError(f"translation index k={k} must be nonnegative")
    psi = generators[l - 1]
    shift = u_of(psi.params, k)
    if kind is SystemKind.CO_AFFINE:
        if weights is None:
            raise PreconditionError("co-affine elements need a weight table")
        return translate(dilate(psi, j), shift) * weights(l, j)
    if kind is SystemKind.AFFINE or j >= 0:
        return dilate(translate(psi, shift), j)
    return translate(dilate(psi, j), shift) * float(psi.q) ** (j / 2)

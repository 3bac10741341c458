"""Exact arithmetic in GF(p^c) and in K = GF(q)((t)).

GF(q) is realised as GF(p)[X]/(m(X)) with basis eps_j = X^j, so eps_0 = 1.
An element of GF(q) is carried either as a :class:`GFElement` (coordinate
vector) or as its *code*, the integer ``sum(coords[i] * p**i)`` in
``[0, q)``.  Codes are what the digit-level machinery in the rest of the
package uses; the two forms are interchangeable.

Elements of K are finite Laurent polynomials in the prime element t.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .errors import DomainError, ParameterError

# constant term first, monic
DEFAULT_MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (2, 1): (0, 1),
    (3, 1): (0, 1),
    (5, 1): (0, 1),
    (2, 2): (1, 1, 1),
}


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, int(n**0.5) + 1):
        if n % d == 0:
            return False
    return True


def _trim(poly: list[int]) -> list[int]:
    while poly and poly[-1] == 0:
        poly.pop()
    return poly


def _poly_mod(a: list[int], m: Iterable[int], p: int) -> list[int]:
    """Remainder of ``a`` modulo the monic polynomial ``m`` over GF(p)."""
    m = list(m)
    a = _trim([x % p for x in a])
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        lead = a[-1]
        shift = len(a) - 1 - dm
        for i, coef in enumerate(m):
            a[shift + i] = (a[shift + i] - lead * coef) % p
        a = _trim(a)
    return a


def _monic_polys(p: int, degree: int):
    for low in itertools.product(range(p), repeat=degree):
        yield list(low) + [1]


def is_irreducible(modulus: Iterable[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg-1."""
    m = list(modulus)
    deg = len(m) - 1
    if deg < 1 or m[-1] % p != 1:
        return False
    for d in range(1, deg):
        for cand in _monic_polys(p, d):
            if not _poly_mod(m, cand, p):
                return False
    return True


def irreducible_moduli(p: int, c: int) -> list[tuple[int, ...]]:
    """All monic irreducible polynomials of degree ``c`` over GF(p)."""
    return [tuple(m) for m in _monic_polys(p, c) if is_irreducible(m, p)]


@dataclass(frozen=True)
class FieldParams:
    """Parameters p, c, q = p**c and the modulus defining GF(q)."""

    p: int
    c: int
    modulus: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if not is_prime(self.p):
            raise ParameterError(f"p={self.p} is not prime")
        if self.c < 1:
            raise ParameterError(f"c={self.c} must be positive")
        mod = tuple(int(x) for x in self.modulus)
        if not mod:
            mod = DEFAULT_MODULI.get((self.p, self.c)) or irreducible_moduli(self.p, self.c)[0]
        if len(mod) != self.c + 1:
            raise ParameterError(f"modulus {mod} must have degree c={self.c}")
        if any(not 0 <= x < self.p for x in mod):
            raise ParameterError(f"modulus {mod} has coefficients outside [0, {self.p})")
        if mod[-1] != 1:
            raise ParameterError(f"modulus {mod} is not monic")
        if not is_irreducible(mod, self.p):
            raise ParameterError(f"modulus {mod} is reducible over GF({self.p})")
        object.__setattr__(self, "modulus", mod)

    @classmethod
    def from_q(cls, q: int) -> "FieldParams":
        """Parameters for a prime q (c = 1)."""
        if not is_prime(q):
            raise ParameterError(f"q={q} is not prime; give p and c explicitly")
        return cls(q, 1)

    @property
    def q(self) -> int:
        return self.p**self.c

    def to_json(self) -> dict:
        return {"p": self.p, "c": self.c, "modulus": list(self.modulus)}

    # Code-level tables.  Built once per parameter set from GFElement
    # arithmetic; all vectorised digit operations read from these.
    @cached_property
    def add_table(self) -> np.ndarray:
        return self._table(lambda a, b: a + b)

    @cached_property
    def mul_table(self) -> np.ndarray:
        return self._table(lambda a, b: a * b)

    @cached_property
    def neg_table(self) -> np.ndarray:
        return np.array([(-GFElement.from_code(self, a)).code for a in range(self.q)], dtype=np.int64)

    @cached_property
    def sub_table(self) -> np.ndarray:
        return self.add_table[:, self.neg_table]

    def _table(self, op) -> np.ndarray:
        elems = [GFElement.from_code(self, a) for a in range(self.q)]
        out = np.empty((self.q, self.q), dtype=np.int64)
        for a, x in enumerate(elems):
            for b, y in enumerate(elems):
                out[a, b] = op(x, y).code
        out.setflags(write=False)
        return out


def _check_same(a: FieldParams, b: FieldParams):
    if a != b:
        raise ParameterError(f"mismatched field parameters: {a} vs {b}")


@dataclass(frozen=True)
class GFElement:
    """An element of GF(q) as coordinates over GF(p) in the basis eps_j = X^j."""

    params: FieldParams
    coords: tuple[int, ...]

    def __post_init__(self):
        coords = tuple(int(x) % self.params.p for x in self.coords)
        if len(coords) != self.params.c:
            raise ParameterError(f"expected {self.params.c} coordinates, got {len(coords)}")
        object.__setattr__(self, "coords", coords)

    @classmethod
    def from_code(cls, params: FieldParams, code: int) -> "GFElement":
        if not 0 <= code < params.q:
            raise DomainError(f"code {code} outside [0, {params.q})")
        coords = []
        for _ in range(params.c):
            code, r = divmod(code, params.p)
            coords.append(r)
        return cls(params, tuple(coords))

    @classmethod
    def zero(cls, params: FieldParams) -> "GFElement":
        return cls(params, (0,) * params.c)

    @classmethod
    def one(cls, params: FieldParams) -> "GFElement":
        return cls(params, (1,) + (0,) * (params.c - 1))

    @classmethod
    def eps(cls, params: FieldParams, j: int) -> "GFElement":
        coords = [0] * params.c
        coords[j] = 1
        return cls(params, tuple(coords))

    @property
    def code(self) -> int:
        return sum(a * self.params.p**i for i, a in enumerate(self.coords))

    def is_zero(self) -> bool:
        return not any(self.coords)

    def __add__(self, other: "GFElement") -> "GFElement":
        _check_same(self.params, other.params)
        return GFElement(self.params, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "GFElement":
        return GFElement(self.params, tuple(-a for a in self.coords))

    def __sub__(self, other: "GFElement") -> "GFElement":
        return self + (-other)

    def __mul__(self, other: "GFElement") -> "GFElement":
        _check_same(self.params, other.params)
        p = self.params.p
        prod = [0] * (2 * self.params.c - 1)
        for i, a in enumerate(self.coords):
            if a:
                for j, b in enumerate(other.coords):
                    prod[i + j] += a * b
        rem = _poly_mod(prod, self.params.modulus, p)
        return GFElement(self.params, tuple(rem + [0] * (self.params.c - len(rem))))


def gf_arith(a: GFElement, b: GFElement, op: str) -> GFElement:
    """Functional form of GF(q) arithmetic; ``op`` in {"add", "mul", "neg"}."""
    if op == "neg":
        return -a
    _check_same(a.params, b.params)
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown op {op!r}")


class Abs(NamedTuple):
    """|x| = q**k, or zero."""

    zero: bool
    k: int

    def value(self, q: int) -> float:
        return 0.0 if self.zero else float(q) ** self.k


class FieldElement:
    """A finite Laurent polynomial sum(c_i t**i) with coefficients in GF(q).

    Coefficients are stored as codes; zero coefficients are never stored.
    """

    __slots__ = ("params", "_terms")

    def __init__(self, params: FieldParams, terms: Mapping[int, int | GFElement] | None = None):
        clean = {}
        for e, a in (terms or {}).items():
            code = a.code if isinstance(a, GFElement) else int(a)
            if not 0 <= code < params.q:
                raise DomainError(f"coefficient code {code} outside [0, {params.q})")
            if code:
                clean[int(e)] = code
        self.params = params
        self._terms = tuple(sorted(clean.items()))

    @classmethod
    def zero(cls, params: FieldParams) -> "FieldElement":
        return cls(params)

    @classmethod
    def monomial(cls, params: FieldParams, exponent: int, coeff: int | GFElement = 1) -> "FieldElement":
        return cls(params, {exponent: coeff})

    @classmethod
    def prime(cls, params: FieldParams) -> "FieldElement":
        """The prime element t."""
        return cls.monomial(params, 1)

    @property
    def terms(self) -> dict[int, int]:
        """Exponent -> nonzero coefficient code."""
        return dict(self._terms)

    def coefficient(self, exponent: int) -> GFElement:
        return GFElement.from_code(self.params, self.terms.get(exponent, 0))

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def valuation(self) -> int | None:
        return self._terms[0][0] if self._terms else None

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.params == other.params and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.params, self._terms))

    def __repr__(self) -> str:
        if not self._terms:
            return "FieldElement(0)"
        body = " + ".join(f"{a}*t^{e}" for e, a in self._terms)
        return f"FieldElement({body})"

    def __add__(self, other: "FieldElement") -> "FieldElement":
        _check_same(self.params, other.params)
        add = self.params.add_table
        out = self.terms
        for e, b in other._terms:
            out[e] = int(add[out.get(e, 0), b])
        return FieldElement(self.params, out)

    def __neg__(self) -> "FieldElement":
        neg = self.params.neg_table
        return FieldElement(self.params, {e: int(neg[a]) for e, a in self._terms})

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return self + (-other)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        _check_same(self.params, other.params)
        add, mul = self.params.add_table, self.params.mul_table
        out: dict[int, int] = {}
        for e1, a in self._terms:
            for e2, b in other._terms:
                e = e1 + e2
                out[e] = int(add[out.get(e, 0), mul[a, b]])
        return FieldElement(self.params, out)

    def shift(self, n: int) -> "FieldElement":
        """Multiply by t**n."""
        return FieldElement(self.params, {e + n: a for e, a in self._terms})


def fe_arith(x: FieldElement, y: FieldElement, op: str) -> FieldElement:
    """Functional form of arithmetic in K; ``op`` in {"add", "mul", "neg"}."""
    if op == "neg":
        return -x
    _check_same(x.params, y.params)
    if op == "add":
        return x + y
    if op == "mul":
        return x * y
    raise ValueError(f"unknown op {op!r}")


def fe_abs(x: FieldElement) -> Abs:
    if x.is_zero():
        return Abs(True, 0)
    return Abs(False, -x.valuation)


def base_q_digits(n: int, q: int) -> list[int]:
    digits = []
    while n:
        n, r = divmod(n, q)
        digits.append(r)
    return digits


def u_of(params: FieldParams, n: int) -> FieldElement:
    """The translation u(n): base-q digit b_j of n lands at exponent -(j+1)."""
    if n < 0:
        raise DomainError(f"u(n) needs n >= 0, got {n}")
    return FieldElement(params, {-(j + 1): b for j, b in enumerate(base_q_digits(n, params.q))})


def index_in_lambda(x: FieldElement) -> int:
    """Inverse of :func:`u_of` on Lambda = {u(n)}."""
    q = x.params.q
    n = 0
    for e, a in x._terms:
        if e >= 0:
            raise DomainError(f"{x!r} has a coefficient at exponent {e} >= 0; not in Lambda")
        n += a * q ** (-e - 1)
    return n


def chi(x: FieldElement) -> int:
    """Root-of-unity index a with chi(x) = exp(2*pi*i*a/p).

    a is the eps_0-coordinate of the coefficient of t**-1.
    """
    return x.terms.get(-1, 0) % x.params.p


def chi_value(x: FieldElement) -> complex:
    return root_of_unity(chi(x), x.params.p)


def root_of_unity(a: int, n: int) -> complex:
    """exp(2 pi i a/n), exact at the quarter turns."""
    a %= n
    quarter, rem = divmod(4 * a, n)
    if rem == 0:
        return (1, 1j, -1, -1j)[quarter]
    return complex(np.exp(2j * np.pi * a / n))

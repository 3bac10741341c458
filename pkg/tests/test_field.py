import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lff.errors import DomainError, ParameterError
from lff.field import (
    Abs,
    FieldElement,
    FieldParams,
    GFElement,
    chi,
    chi_value,
    fe_abs,
    fe_arith,
    gf_arith,
    index_in_lambda,
    irreducible_moduli,
    is_irreducible,
    u_of,
)


def t(P, e, a=1):
    return FieldElement.monomial(P, e, a)


class TestFieldParams:
    def test_q(self):
        assert FieldParams(2, 2).q == 4
        assert FieldParams(5, 1).q == 5

    def test_default_modulus_for_q4(self):
        assert FieldParams(2, 2).modulus == (1, 1, 1)

    def test_fallback_modulus_is_irreducible(self):
        P = FieldParams(3, 2)
        assert is_irreducible(P.modulus, 3)

    @pytest.mark.parametrize("p", [1, 4, 9])
    def test_non_prime_rejected(self, p):
        with pytest.raises(ParameterError):
            FieldParams(p, 1)

    def test_reducible_modulus_rejected(self):
        # X^2 + 1 = (X + 1)^2 over GF(2)
        with pytest.raises(ParameterError, match="reducible"):
            FieldParams(2, 2, (1, 0, 1))

    def test_non_monic_rejected(self):
        with pytest.raises(ParameterError):
            FieldParams(3, 2, (1, 0, 2))

    def test_from_q_prime_power_rejected(self):
        with pytest.raises(ParameterError):
            FieldParams.from_q(4)

    def test_irreducible_counts(self):
        # number of monic irreducibles of degree n over GF(p): (1/n) sum_{d|n} mu(d) p^(n/d)
        assert len(irreducible_moduli(2, 2)) == 1
        assert len(irreducible_moduli(2, 3)) == 2
        assert len(irreducible_moduli(2, 4)) == 3
        assert len(irreducible_moduli(3, 2)) == 3


class TestGF:
    def test_char_two(self):
        P = FieldParams(2, 1)
        one = GFElement.one(P)
        assert gf_arith(one, one, "add").is_zero()

    def test_eps1_squared_q4(self):
        P = FieldParams(2, 2)
        e1 = GFElement.eps(P, 1)
        assert gf_arith(e1, e1, "mul").coords == (1, 1)

    def _reduce_oracle(self, a, b, P):
        # schoolbook product then repeated subtraction of the modulus
        prod = [0] * (2 * P.c - 1)
        for i, x in enumerate(a):
            for j, y in enumerate(b):
                prod[i + j] += x * y
        prod = [v % P.p for v in prod]
        m = P.modulus
        for d in range(len(prod) - 1, P.c - 1, -1):
            lead = prod[d]
            if lead:
                for i, mi in enumerate(m):
                    prod[d - P.c + i] = (prod[d - P.c + i] - lead * mi) % P.p
        return tuple(prod[: P.c])

    @pytest.mark.parametrize("pc", [(2, 2), (3, 2), (2, 3)])
    def test_multiplication_table_against_reduction(self, pc):
        P = FieldParams(*pc)
        for a, b in itertools.product(range(P.q), repeat=2):
            x, y = GFElement.from_code(P, a), GFElement.from_code(P, b)
            assert (x * y).coords == self._reduce_oracle(x.coords, y.coords, P)

    def test_field_axioms(self, params):
        P = params
        els = [GFElement.from_code(P, a) for a in range(P.q)]
        one, zero = GFElement.one(P), GFElement.zero(P)
        for a in els:
            assert a * one == a
            assert a + (-a) == zero
            if not a.is_zero():
                assert sum((a * b == one for b in els)) == 1
        for a, b, c in itertools.product(els, repeat=3):
            assert a * (b + c) == a * b + a * c

    def test_tables_match_elements(self, params):
        P = params
        for a, b in itertools.product(range(P.q), repeat=2):
            x, y = GFElement.from_code(P, a), GFElement.from_code(P, b)
            assert P.add_table[a, b] == (x + y).code
            assert P.mul_table[a, b] == (x * y).code
            assert P.sub_table[a, b] == (x - y).code

    def test_mismatched_params(self):
        with pytest.raises(ParameterError):
            gf_arith(GFElement.one(FieldParams(2, 1)), GFElement.one(FieldParams(3, 1)), "add")


class TestFieldElement:
    def test_examples_q2(self, q2):
        assert (t(q2, -1) + t(q2, -1)).is_zero()
        assert t(q2, -1) * t(q2, -1) == t(q2, -2)
        x = t(q2, -1) + t(q2, 0)
        assert fe_arith(x, x, "mul") == t(q2, -2) + t(q2, 0)

    def test_no_zero_coefficients(self, q3):
        x = FieldElement(q3, {-1: 1, 0: 0, 2: 2})
        assert set(x.terms) == {-1, 2}
        y = x + FieldElement(q3, {-1: 2})
        assert set(y.terms) == {2}

    def test_abs_examples(self, q2, q3):
        assert fe_abs(FieldElement.zero(q2)).zero
        assert fe_abs(t(q2, -2) + t(q2, -1)) == Abs(False, 2)
        assert fe_abs(t(q3, 5)) == Abs(False, -5)
        assert fe_abs(t(q3, 5)).value(3) == 3.0**-5

    def test_mismatched_params(self, q2, q3):
        with pytest.raises(ParameterError):
            t(q2, 0) + t(q3, 0)


class TestU:
    def test_examples(self, q2):
        assert u_of(q2, 0).is_zero()
        assert u_of(q2, 3) == t(q2, -2) + t(q2, -1)
        assert u_of(q2, 3) == u_of(q2, 1).shift(-1) + u_of(q2, 1)
        assert fe_abs(u_of(q2, 5)) == Abs(False, 3)

    def test_digit_placement_q4(self):
        P = FieldParams(2, 2)
        # 6 = 2 + 1*4: digit code 2 (eps_1) at t^-1, code 1 at t^-2
        assert u_of(P, 6).terms == {-1: 2, -2: 1}

    def test_negative_exponents_only(self, params):
        for n in range(params.q**4):
            assert all(e < 0 for e in u_of(params, n).terms)

    def test_index_examples(self, q2, q3):
        assert index_in_lambda(FieldElement.zero(q2)) == 0
        assert index_in_lambda(t(q2, -2) + t(q2, -1)) == 3
        assert index_in_lambda(t(q3, -1, 2)) == 2

    def test_index_round_trip(self, params):
        for n in range(min(params.q**6, 2**10)):
            assert index_in_lambda(u_of(params, n)) == n

    @pytest.mark.parametrize("e", [0, 1, 3])
    def test_index_rejects_outside_lambda(self, q2, e):
        with pytest.raises(DomainError):
            index_in_lambda(t(q2, -1) + t(q2, e))


class TestChi:
    def test_examples(self, q2):
        assert chi_value(t(q2, -1)) == -1
        assert chi_value(t(q2, 0)) == 1
        assert chi_value(t(q2, -2)) == 1

    def test_q4_reads_eps0(self):
        P = FieldParams(2, 2)
        assert chi(t(P, -1, 1)) == 1  # eps_0 t^-1
        assert chi(t(P, -1, 2)) == 0  # eps_1 t^-1
        assert chi(t(P, -1, 3)) == 1

    def test_trivial_on_D(self, params):
        for a in range(params.q):
            assert chi(t(params, 0, a) + t(params, 3, a)) == 0



def _element(P, draw_terms):
    return FieldElement(P, {e: a % P.q for e, a in draw_terms})


term_lists = st.lists(st.tuples(st.integers(-6, 5), st.integers(0, 10)), max_size=5)


@settings(max_examples=200, deadline=None)
@given(term_lists, term_lists, term_lists, st.sampled_from([(2, 1), (3, 1), (2, 2), (5, 1)]))
def test_ring_axioms(a, b, c, pc):
    P = FieldParams(*pc)
    x, y, z = (_element(P, v) for v in (a, b, c))
    assert x + y == y + x
    assert x * y == y * x
    assert x * (y + z) == x * y + x * z
    assert (x + y) + z == x + (y + z)
    assert x - x == FieldElement.zero(P)


@settings(max_examples=200, deadline=None)
@given(term_lists, term_lists, st.sampled_from([(2, 1), (3, 1), (2, 2)]))
def test_abs_and_chi(a, b, pc):
    P = FieldParams(*pc)
    x, y = _element(P, a), _element(P, b)
    ax, ay = fe_abs(x), fe_abs(y)
    axy = fe_abs(x * y)
    if ax.zero or ay.zero:
        assert axy.zero
    else:
        assert axy.k == ax.k + ay.k
    assert chi(x + y) == (chi(x) + chi(y)) % P.p

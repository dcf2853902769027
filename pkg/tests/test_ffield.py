from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from artifact.errors import DenominatorDivisibleByP, NoSuchSubfield, NotPrime
from artifact.ffield import (FFElem, FieldCtx, ff_frobenius, ff_make, ff_primitive, lucas_binom,
                             multiplicative_order)

FIELDS = [ff_make(2), ff_make(3), ff_make(2, 2), ff_make(3, 1, 2), ff_make(2, 1, 3), ff_make(3, 2)]


def elems(F):
    return st.integers(0, F.size - 1).map(lambda c: FFElem(F, c))


@pytest.mark.parametrize("F", FIELDS, ids=lambda F: f"{F.p}^{F.n}")
def test_field_axioms(F):
    @given(elems(F), elems(F), elems(F))
    def check(a, b, c):
        assert a + b == b + a and a * b == b * a
        assert (a + b) + c == a + (b + c)
        assert (a * b) * c == a * (b * c)
        assert a * (b + c) == a * b + a * c
        assert a - a == 0
        if a:
            assert a * a.inverse() == 1
    check()


def test_f4_modulus_and_mult():
    F = ff_make(2, 2)
    assert F.modulus == (1, 1, 1)
    x = FFElem(F, F.encode([0, 1]))
    assert x * x == x + 1


def test_frobenius_fixes_subfield():
    F = ff_make(3, 1, 2)
    for a in F.elements():
        assert ff_frobenius(a, 2) == a
        assert ff_frobenius(ff_frobenius(a, 1), -1) == a
        assert (ff_frobenius(a, 1) == a) == F.in_subfield(a.code, 1)


def test_primitive_generates():
    for F in FIELDS:
        g = ff_primitive(F, F.L)
        assert multiplicative_order(g) == F.q ** F.L - 1


def test_primitive_subfield_error():
    with pytest.raises(NoSuchSubfield):
        ff_primitive(ff_make(3, 1, 2), 3)


def test_errors():
    with pytest.raises(NotPrime):
        FieldCtx(4)
    with pytest.raises(ValueError):
        FieldCtx(3, 1, 2, modulus=[2, 0, 1])


def test_json_roundtrip():
    F = ff_make(3, 1, 2)
    G = FieldCtx.from_json(F.to_json())
    assert G.modulus == F.modulus and G.q == F.q and G.L == F.L


@given(st.integers(0, 400), st.integers(0, 30), st.sampled_from([2, 3, 5, 7]))
def test_lucas_matches_comb(x, n, p):
    assert lucas_binom(x, n, p) == comb(x, n) % p


@given(st.integers(1, 200), st.integers(0, 20), st.sampled_from([2, 3, 5]))
def test_lucas_negative_integers(x, n, p):
    # binom(-x, n) = (-1)^n binom(x+n-1, n)
    assert lucas_binom(-x, n, p) == (-1) ** n * comb(x + n - 1, n) % p


def test_lucas_examples():
    assert lucas_binom(5, 2, 3) == 1
    assert lucas_binom(Fraction(1, 2), 1, 3) == 2
    with pytest.raises(DenominatorDivisibleByP):
        lucas_binom(Fraction(1, 3), 1, 3)

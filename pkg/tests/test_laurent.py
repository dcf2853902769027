from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from artifact.errors import InseparableOperand, NegativeTwistUnrepresentable, RamificationTooSmall, ZeroDivisor
from artifact.ffield import ff_make
from artifact.laurent import (INF, LaurentCtx, RamifiedLaurent, Valuation, rl_const_theta_power, rl_frobenius,
                              rl_inv, rl_theta_hyperderiv, theta_poly, theta_power)

F3 = ff_make(3)
CTX = LaurentCtx(F3, 2, 60)


def series(ctx=CTX, lo=-6, hi=12, prec=None):
    terms = st.dictionaries(st.integers(lo, hi), st.integers(1, ctx.field.size - 1), min_size=1, max_size=6)
    return terms.map(lambda t: RamifiedLaurent(ctx, t, INF if prec is None else prec))


@given(series(), series(), series())
def test_ring_axioms(a, b, c):
    assert a + b == b + a and a * b == b * a
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(series())
def test_inverse(a):
    inv = rl_inv(a)
    prod = a * inv
    assert (prod - RamifiedLaurent.one(CTX)).vexp() >= prod.prec


@given(series(), series())
def test_ultrametric(a, b):
    s = a + b
    if s.terms:
        assert s.valuation() >= min(a.valuation(), b.valuation())
    assert (a * b).valuation() == Valuation(a.vexp() + b.vexp(), CTX.M)


@given(series(), series())
def test_frobenius_homomorphism(a, b):
    for n in (1, 2):
        assert rl_frobenius(a * b, n) == rl_frobenius(a, n) * rl_frobenius(b, n)
        assert rl_frobenius(a + b, n) == rl_frobenius(a, n) + rl_frobenius(b, n)
        assert rl_frobenius(rl_frobenius(a, n), -n) == a


def test_negative_twist():
    x = RamifiedLaurent.monomial(CTX, 1)
    with pytest.raises(NegativeTwistUnrepresentable):
        rl_frobenius(x, -1)
    wide = rl_frobenius(x, -1, widen=True)
    assert wide.ctx.M == 6 and wide.terms == {1: 1}


def test_theta_encoding():
    th = theta_power(CTX, 1)
    assert th.valuation() == Valuation(-1, 1)
    assert th * th == theta_power(CTX, 2)
    # (-theta)^(1/2) squared is -theta
    r = rl_const_theta_power(1, 2, CTX)
    assert r * r == -th
    with pytest.raises(RamificationTooSmall):
        rl_const_theta_power(1, 3, CTX)


def test_theta_hyperderiv_polynomial():
    # d_theta(theta^3 + theta) = 3 theta^2 + 1 = 1 over F_3
    f = theta_poly(CTX, {3: 1, 1: 1})
    assert rl_theta_hyperderiv(f, 1) == RamifiedLaurent.one(CTX)
    # d_theta^(3)(theta^3) = 1
    assert rl_theta_hyperderiv(theta_power(CTX, 3), 3) == RamifiedLaurent.one(CTX)


def test_theta_hyperderiv_inseparable():
    with pytest.raises(InseparableOperand):
        rl_theta_hyperderiv(RamifiedLaurent.one(LaurentCtx(F3, 3)), 1)


@given(series(), series(), st.integers(0, 4))
def test_theta_leibniz(a, b, n):
    lhs = rl_theta_hyperderiv(a * b, n)
    rhs = RamifiedLaurent.zero(CTX)
    for i in range(n + 1):
        rhs = rhs + rl_theta_hyperderiv(a, i) * rl_theta_hyperderiv(b, n - i)
    assert lhs == rhs


def test_zero_inverse():
    with pytest.raises(ZeroDivisor):
        rl_inv(RamifiedLaurent.zero(CTX, 10))


def test_precision_tracking():
    a = RamifiedLaurent(CTX, {0: 1, 3: 1}, 10)
    b = RamifiedLaurent(CTX, {-2: 1}, 8)
    assert (a + b).prec == 8
    assert (a * b).prec == min(10 - 2, 8 + 0)


@given(series())
def test_json_roundtrip(a):
    assert RamifiedLaurent.from_json(a.to_json(), CTX) == a


def test_valuation_value():
    assert Valuation(3, 2).value == Fraction(3, 2)
    assert Valuation.inf().value == INF

from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from artifact.errors import ATRangeUnsupported, DigitOutOfRange, RamificationTooSmall, WeightBoundViolated
from artifact.ffield import ff_make
from artifact.laurent import LaurentCtx, RamifiedLaurent, rl_inv, theta_power
from artifact.special import (Index, PadicDigits, at_weights, bbD, bbD_recursive, carlitz_factorial, carlitz_pi,
                              carlitz_zeta, ctx_for, digits_of_fraction, gamma_arith, gamma_carlitz, gfun, mzv,
                              omega, omega_product, power_sum, WeightProvider)
from artifact.tate import TateSeries, ts_eval_theta

F3 = ff_make(3)
F2 = ff_make(2)


def ell(ctx, d):
    """Carlitz l_d = prod_{i=1..d} (theta - theta^(q^i))."""
    out = RamifiedLaurent.one(ctx)
    for i in range(1, d + 1):
        out = out * (theta_power(ctx, 1) - theta_power(ctx, ctx.q ** i))
    return out


# -- digits and indices --------------------------------------------------------------

@given(st.integers(0, 10 ** 5), st.sampled_from([2, 3, 4, 5]))
def test_digits_roundtrip(s, q):
    assert PadicDigits.from_int(s, q).to_int() == s


def test_digits_negative():
    d = PadicDigits.from_int(-1, 3)
    assert d.preperiod == () and d.period == (2,)


def test_digits_of_fraction():
    d = digits_of_fraction(1, 2, 3)
    assert d.period == (1, 0) and [d.digit(j) for j in range(6)] == [1, 0, 1, 0, 1, 0]
    assert digits_of_fraction(3, 2, 3).period == (0, 1)
    with pytest.raises(DigitOutOfRange):
        digits_of_fraction(9, 2, 3)
    with pytest.raises(DigitOutOfRange):
        PadicDigits.make(3, [3], [0])


def test_index():
    s = Index.parse("1,2")
    assert s.parts == (1, 2) and s.wt == 3 and s.dep == 2
    assert Index.of(3).parts == (3,)


# -- D polynomials, G and Gamma --------------------------------------------------------

@pytest.mark.parametrize("i", [0, 1, 2, 3])
def test_bbD_recursion(i):
    ctx = LaurentCtx(F3, 1, 200)
    assert bbD(ctx, i) == bbD_recursive(ctx, i)


def test_gamma_carlitz_q():
    ctx = LaurentCtx(F3, 1, 100)
    assert gamma_carlitz(ctx, 3) == theta_power(ctx, 3) - theta_power(ctx, 1)
    assert carlitz_factorial(ctx, 0) == RamifiedLaurent.one(ctx)
    assert carlitz_factorial(ctx, 2) == RamifiedLaurent.one(ctx)


@pytest.mark.parametrize("s", [1, 2, 3, 5, 7, 11, 13, 26])
def test_gamma_arith_finite_matches_carlitz(s):
    # for integers Gamma(s) = Gamma_C(s) / theta^(sum n s_n q^n)
    ctx = LaurentCtx(F3, 1, 400)
    d = PadicDigits.from_int(s, 3)
    shift = sum(n * dn * 3 ** n for n, dn in enumerate(d.preperiod))
    expect = gamma_carlitz(ctx, s) * theta_power(ctx, -shift)
    assert (gamma_arith(ctx, d) - expect).vexp() >= ctx.prec


def test_gfun_finite_is_polynomial():
    # G(q) = D_1 = 1 - t/theta^q
    ctx = LaurentCtx(F3, 1, 150)
    G = gfun(ctx, PadicDigits.from_int(3, 3))
    assert G.coef(0) == RamifiedLaurent.one(ctx)
    assert G.coef(1) == -theta_power(ctx, -3)
    assert all(G.coef(i).is_zero() for i in range(2, G.N))


# -- Omega -------------------------------------------------------------------------------

def test_omega_functional_equation():
    ctx = ctx_for(F3, 2, 120)
    Om = omega(ctx, 1, 0)
    lhs = omega(ctx, 1, 1)
    rhs = TateSeries.t_minus_theta_power(ctx) * Om
    assert (lhs - rhs).known_vexp() > 100 * ctx.M


@pytest.mark.parametrize("l", [2, 3])
def test_omega_product_unit(l):
    ctx = ctx_for(F3, 3 ** l - 1, 160)
    diff = omega_product(ctx, l) - omega(ctx, 1, 0)
    assert diff.known_vexp() > 150 * ctx.M


def test_omega_ramification():
    with pytest.raises(RamificationTooSmall):
        omega(LaurentCtx(F3, 1, 50), 2, 0)


def test_omega_gauss_norm_leading():
    from artifact.tate import ts_gauss_norm
    ctx = ctx_for(F3, 8, 60)
    assert ts_gauss_norm(omega(ctx, 2, 0)).value == Fraction(9, 8)


def test_omega_times_pi_unit():
    ctx = ctx_for(F3, 2, 150)
    val, err = ts_eval_theta(omega(ctx, 1, 0))
    prod = (val * carlitz_pi(ctx)).truncate(140 * ctx.M)
    assert prod == RamifiedLaurent.one(ctx).truncate(140 * ctx.M)


# -- zeta values ---------------------------------------------------------------------------

@pytest.mark.parametrize("q,F", [(3, F3), (2, F2)])
def test_power_sum_weight_one(q, F):
    ctx = LaurentCtx(F, 1, 200)
    for d in range(4):
        S = power_sum(ctx, d, 1, 150)
        assert (S - rl_inv(ell(ctx, d), 300)).truncate(150).is_zero()


def test_power_sum_degree_one():
    ctx = LaurentCtx(F3, 1, 100)
    S = power_sum(ctx, 1, 1, 80)
    expect = -rl_inv(theta_power(ctx, 3) - theta_power(ctx, 1), 200)
    assert (S - expect).truncate(80).is_zero()


def test_zeta_error_bound():
    ctx = LaurentCtx(F3, 1, 200)
    z5, e5 = carlitz_zeta(ctx, 1, 5)
    z7, _ = carlitz_zeta(ctx, 1, 7)
    assert e5.value == 6
    assert (z5 - z7).vexp() >= 6


def test_mzv_depth_one_is_zeta():
    ctx = LaurentCtx(F3, 1, 200)
    z, _ = carlitz_zeta(ctx, 2, 4)
    m, _ = mzv(ctx, Index.of(2), 4)
    assert z == m


def test_mzv_depth_two_oracle():
    # zeta(1,2) up to degree 2: sum_{d1>d2} S_d1(1) S_d2(2)
    ctx = LaurentCtx(F3, 1, 200)
    m, err = mzv(ctx, Index.of(1, 2), 2)
    prec = int(err.value)
    expect = RamifiedLaurent.zero(ctx)
    for d1 in range(3):
        for d2 in range(d1):
            expect = expect + power_sum(ctx, d1, 1, prec + 20) * power_sum(ctx, d2, 2, prec + 20)
    assert (m - expect).truncate(prec).is_zero()


# -- weights ---------------------------------------------------------------------------------

def test_weights():
    W = at_weights("anderson-thakur", 3)
    assert W.poly(1) == {(0, 0): 1} and W.poly(3) == {(0, 0): 1}
    with pytest.raises(ATRangeUnsupported):
        W.poly(4)
    with pytest.raises(WeightBoundViolated):
        WeightProvider("user-file", 3, {1: {(0, 2): 1}})

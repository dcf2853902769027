from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from artifact.errors import DimensionMismatch, NegativeTwistUnrepresentable
from artifact.ffield import ff_make
from artifact.laurent import LaurentCtx
from artifact.motive import (TwistedExpr, TwistedMatrix, mk_carlitz, mk_derived, mk_direct_sum, mk_M_i,
                             mk_M_index, mk_N, mk_N_derived, mk_phi_psi_l, mk_prolong, parse_prefix, rho,
                             toeplitz_shape_check, verify_rat, verify_spec)
from artifact.relations import IndexSet
from artifact.special import Index, at_weights, ctx_for
from artifact.tate import ts_hyperderiv, ts_twist
from helpers import rand_expr, rand_matrix

F3 = ff_make(3)
F9 = ff_make(3, 1, 2)
seeds = st.integers(0, 10 ** 6)
W = at_weights("anderson-thakur", 3)


@given(seeds)
def test_expr_to_series_is_homomorphism(seed):
    rng = random.Random(seed)
    ctx = LaurentCtx(F3, 1, 100)
    a, b = rand_expr(rng, F3), rand_expr(rng, F3)
    assert (a * b).to_series(ctx) == a.to_series(ctx) * b.to_series(ctx)
    assert (a + b).to_series(ctx) == a.to_series(ctx) + b.to_series(ctx)


@given(seeds, st.integers(0, 3), st.integers(1, 2))
def test_expr_twist_and_hyperderiv_match_series(seed, n, m):
    rng = random.Random(seed)
    ctx = LaurentCtx(F3, 1, 400)
    a = rand_expr(rng, F3)
    assert a.twist(m).to_series(ctx) == ts_twist(a.to_series(ctx), m)
    assert a.hyperderiv(n).to_series(ctx) == ts_hyperderiv(a.to_series(ctx), n)
    assert a.twist(m).twist(-m) == a


def test_negative_twist_needs_ramification():
    x = TwistedExpr.theta(F3, -1)
    with pytest.raises(NegativeTwistUnrepresentable):
        x.to_series(LaurentCtx(F3, 1, 50))
    s = x.to_series(LaurentCtx(F3, 3, 50))
    assert s.coef(0).terms == {-1: 2}


@given(seeds)
def test_prefix_roundtrip(seed):
    rng = random.Random(seed)
    a = rand_expr(rng, F9).twist(rng.randint(-2, 2))
    assert parse_prefix(a.to_prefix(), F9) == a


def test_prefix_operators():
    tm = TwistedExpr.t_minus_theta(F3)
    assert parse_prefix("dt(1, poly(1*t^2*theta^0))", F3) == TwistedExpr(F3, {(1, 0): 2})
    assert parse_prefix("mul(poly(1*t^1*theta^0 + 2*t^0*theta^1), poly(1*t^1*theta^0 + 2*t^0*theta^1))", F3) == tm * tm
    assert parse_prefix("add(tw(1, poly(1*t^0*theta^1)), poly(1*t^1*theta^0))", F3) == TwistedExpr.t_minus_theta(F3, 1) + TwistedExpr.theta(F3, 1) * 2


def test_rho_linear():
    tm = TwistedExpr.t_minus_theta(F3)
    r = rho(TwistedMatrix([[tm]]), 1)
    one = TwistedExpr.const(F3, 1)
    assert r == TwistedMatrix([[tm, TwistedExpr.zero(F3)], [one, tm]])


@given(seeds, st.sampled_from([2, 3]), st.integers(0, 2))
def test_rho_homomorphism(seed, d, n):
    rng = random.Random(seed)
    X, Y = rand_matrix(rng, F3, d), rand_matrix(rng, F3, d)
    assert rho(X @ Y, n) == rho(X, n) @ rho(Y, n)


def test_det_at_theta():
    tm = TwistedExpr.t_minus_theta(F3)
    assert TwistedMatrix([[tm]]).det_at_theta().is_zero()
    N = mk_N(F3, 2).Phi
    assert N.det_at_theta().is_zero()
    assert TwistedMatrix.identity(F3, 3).det_at_theta() == 1


def test_carlitz_trivialization_and_fault():
    ctx = ctx_for(F3, 2, 200)
    spec = mk_carlitz(F3)
    rep = verify_spec(spec, ctx)
    assert rep.passed and rep.defect_valuation > 150
    bad = verify_spec(spec, ctx, perturb=(0, 0))
    assert not bad.passed and bad.defect_exponent == 5


def test_derived_N_matches_closed_form():
    for l in (2, 3):
        assert mk_derived(mk_N(F3, l), l).Phi == mk_N_derived(F3, l).Phi


def test_phi_psi_l():
    F = ff_make(3, 1, 2)
    ctx = ctx_for(F, 8, 200)
    assert verify_spec(mk_phi_psi_l(F, 2), ctx).passed


def test_prolonged_psi_is_toeplitz():
    ctx = ctx_for(F3, 2, 100)
    spec = mk_prolong(mk_carlitz(F3), 2)
    assert toeplitz_shape_check(spec.psi(ctx), 2, 1)
    assert toeplitz_shape_check(spec.Phi.rows, 2, 1)
    with pytest.raises(DimensionMismatch):
        toeplitz_shape_check(spec.Phi.rows, 1, 2)


def test_M_index_shape():
    s = Index.of(1, 2)
    spec = mk_M_index(F3, s, 0, W)
    tm = TwistedExpr.t_minus_theta(F3)
    assert spec.Phi[0, 0] == tm ** 3 and spec.Phi[1, 1] == tm ** 2 and spec.Phi[2, 2] == 1
    assert spec.Phi[1, 0] == tm ** 3 and spec.Phi[2, 1] == tm ** 2
    assert spec.Phi[2, 0].is_zero()


def test_direct_sum_is_conjunction():
    ctx = ctx_for(F3, 2, 200)
    parts = [mk_carlitz(F3), mk_M_index(F3, Index.of(1), 0, W)]
    total = verify_spec(mk_direct_sum(parts), ctx)
    each = [verify_spec(p, ctx) for p in parts]
    assert total.passed == all(r.passed for r in each)
    assert total.defect_valuation == min(r.defect_valuation for r in each)


def test_M0_is_prolonged_carlitz():
    assert mk_M_i(F3, IndexSet.parse("1;2;1,2"), 1, 0, W).Phi == mk_prolong(mk_carlitz(F3), 1).Phi


def test_verify_dimension_mismatch():
    ctx = ctx_for(F3, 2, 50)
    spec = mk_carlitz(F3)
    with pytest.raises(DimensionMismatch):
        verify_rat(TwistedMatrix.identity(F3, 2), spec.psi(ctx), 1, ctx)

from __future__ import annotations

import random

import pytest
from hypothesis import given, strategies as st

from artifact.errors import BudgetExceeded, InsufficientPrecision, NotSubClosed
from artifact.ffield import ff_make
from artifact.laurent import LaurentCtx, RamifiedLaurent, theta_power
from artifact.relations import (IndexSet, algebraic_relations, check_omega_product, check_prop_gam_omega,
                                enumerate_en, identity_suite, independent_family_size, is_sub_closed,
                                linear_relations, prop_gam_omega_ctx, relation_values, sub, sub_closure,
                                subsequences, trdeg_cpty, trdeg_gamma_hyper, trdeg_main_total, trdeg_sub_indep,
                                validate_en)
from artifact.special import Index
from helpers import rand_laurent

F3 = ff_make(3)

index_sets = st.lists(st.lists(st.integers(1, 3), min_size=1, max_size=3).map(tuple), min_size=1, max_size=4)


def test_sub_example():
    assert set(sub(Index.of(1, 2, 3))) == {Index.of(*x) for x in [(1,), (2,), (3,), (1, 2), (2, 3), (1, 2, 3)]}
    assert set(subsequences(Index.of(1, 2))) == {Index.of(1), Index.of(2), Index.of(1, 2)}
    assert len(subsequences(Index.of(1, 2, 3))) == 7


@given(index_sets)
def test_sub_closure_idempotent(items):
    I = sub_closure(IndexSet(items))
    assert sub_closure(I) == I and is_sub_closed(I)


@given(index_sets, st.integers(0, 2))
def test_enumeration_is_valid(items, n):
    order = enumerate_en(sub_closure(IndexSet(items)), n)
    assert validate_en(order)
    assert len(order) == len(sub_closure(IndexSet(items))) * (n + 1)


def test_enumeration_matches_worked_example():
    order = enumerate_en(IndexSet.parse("1;2;1,2"), 2)
    assert order[:4] == [(Index.of(1), 0), (Index.of(2), 0), (Index.of(1, 2), 0), (Index.of(1), 1)]


def test_enumeration_errors():
    with pytest.raises(NotSubClosed):
        enumerate_en(IndexSet.parse("1,2"), 1)
    bad = [(Index.of(1, 2), 0), (Index.of(1), 0), (Index.of(2), 0)]
    assert not validate_en(bad)


def test_counts():
    assert trdeg_cpty(3, 1, 3, 3) == 2
    assert trdeg_gamma_hyper(2, 1) == 4
    assert trdeg_sub_indep(2, 1) == 8
    for r in range(1, 4):
        for n in range(3):
            for l in range(1, 4):
                assert trdeg_main_total(r, n, l) == (n + 1) * (l + 2 ** r - 1) == independent_family_size(r, n, l)


def test_linear_relation_found():
    rng = random.Random(5)
    ctx = LaurentCtx(F3, 1, 120)
    a, b = rand_laurent(rng, ctx, 0, 60, 20), rand_laurent(rng, ctx, 0, 60, 20)
    c = a * theta_power(ctx, 2) + b.scale(2)
    vals = [("a", a.truncate(100)), ("b", b.truncate(100)), ("c", c.truncate(100))]
    basis = linear_relations(vals, 2)
    assert len(basis.relations) == 1
    rel = basis.relations[0]
    # proportional to theta^2 a + 2 b - c
    assert set(rel.coeffs) == {"a", "b", "c"}
    assert all(v >= basis.precision for v in relation_values(basis, vals))


def test_random_values_independent():
    rng = random.Random(7)
    ctx = LaurentCtx(F3, 1, 200)
    vals = [(f"v{i}", RamifiedLaurent(ctx, {m: rng.randrange(3) for m in range(-10, 150)}, 150)) for i in range(3)]
    assert linear_relations(vals, 2).empty


def test_insufficient_precision():
    ctx = LaurentCtx(F3, 1, 20)
    vals = [("x", RamifiedLaurent(ctx, {0: 1, 1: 1}, 4)), ("y", RamifiedLaurent(ctx, {0: 2, 2: 1}, 4))]
    with pytest.raises(InsufficientPrecision):
        linear_relations(vals, 5)


def test_budget():
    ctx = LaurentCtx(F3, 1, 20)
    vals = [(f"v{i}", RamifiedLaurent.one(ctx)) for i in range(6)]
    with pytest.raises(BudgetExceeded):
        algebraic_relations(vals, 4, 10, budget=100)


@pytest.mark.parametrize("j", [0, 1])
def test_prop_identity_and_faults(j):
    ctx = prop_gam_omega_ctx(3, 2, 200)
    assert check_prop_gam_omega(ctx, 2, j).passed
    bad = check_prop_gam_omega(ctx, 2, j, fault="u5")
    assert not bad.passed and bad.defect_exponent == 5


def test_omega_product_check():
    ctx = prop_gam_omega_ctx(3, 2, 200)
    assert check_omega_product(ctx, 2).passed
    assert not check_omega_product(ctx, 2, fault="u5").passed


def test_empty_suite():
    assert identity_suite({}).reports == []


def test_report_json():
    ctx = prop_gam_omega_ctx(3, 2, 200)
    data = check_omega_product(ctx, 2).to_json()
    assert data["status"] == "PASS" and "defect_valuation" in data

from __future__ import annotations

import random

from artifact.laurent import INF, RamifiedLaurent
from artifact.motive import TwistedExpr, TwistedMatrix
from artifact.tate import TateSeries


def rand_laurent(rng: random.Random, ctx, lo=-8, hi=8, k=4) -> RamifiedLaurent:
    F = ctx.field
    return RamifiedLaurent(ctx, {rng.randint(lo, hi): rng.randrange(1, F.size) for _ in range(k)})


def rand_series(rng: random.Random, ctx, N=10, dense=6) -> TateSeries:
    coeffs = {i: rand_laurent(rng, ctx) for i in rng.sample(range(N), dense)}
    return TateSeries(ctx, coeffs, INF, N)


def rand_poly(rng: random.Random, ctx, deg=8) -> TateSeries:
    return TateSeries.poly(ctx, [rand_laurent(rng, ctx, lo=-4 * ctx.M, hi=0, k=3) for _ in range(deg + 1)])


def rand_expr(rng: random.Random, F, tdeg=2, thdeg=3, k=3) -> TwistedExpr:
    terms = {(rng.randint(0, tdeg), rng.randint(0, thdeg)): rng.randrange(1, F.size) for _ in range(k)}
    return TwistedExpr(F, terms)


def rand_matrix(rng: random.Random, F, n: int) -> TwistedMatrix:
    return TwistedMatrix([[rand_expr(rng, F) for _ in range(n)] for _ in range(n)])

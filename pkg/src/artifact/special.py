"""Constructors for the special series and values: Omega_l and its twists, the
gamma deformation G(s), arithmetic and Carlitz gamma values, zeta values,
Anderson-Thakur type series and the Carlitz period oracle."""
from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import ATRangeUnsupported, DigitOutOfRange, RamificationTooSmall, WeightBoundViolated
from .ffield import FieldCtx
from .laurent import INF, LaurentCtx, RamifiedLaurent, Valuation, rl_inv, theta_power, theta_poly
from .tate import TailCertificate, TateSeries, ts_div_binomial, ts_twist

DEFAULT_TARGET = 200


# -- digits -------------------------------------------------------------------------

@dataclass(frozen=True)
class PadicDigits:
    """Eventually periodic base-q digits of s in Z_p, least significant first."""

    q: int
    preperiod: tuple[int, ...]
    period: tuple[int, ...]

    def __post_init__(self):
        if not self.period:
            raise DigitOutOfRange("period must be nonempty")
        for d in self.preperiod + self.period:
            if not 0 <= d <= self.q - 1:
                raise DigitOutOfRange(f"digit {d} outside [0, {self.q - 1}]")

    @classmethod
    def make(cls, q: int, preperiod, period) -> PadicDigits:
        pre, per = list(preperiod), list(period)
        if not per:
            raise DigitOutOfRange("period must be nonempty")
        n = len(per)
        for k in range(1, n + 1):
            if n % k == 0 and per == per[:k] * (n // k):
                per = per[:k]
                break
        while pre and pre[-1] == per[-1]:
            per = [per[-1]] + per[:-1]
            pre.pop()
        return cls(q, tuple(pre), tuple(per))

    @classmethod
    def from_int(cls, s: int, q: int) -> PadicDigits:
        if s < 0:
            # s = -k: digits of q^L - k followed by all (q-1)
            L = 1
            while q ** L < -s:
                L += 1
            v = q ** L + s
            pre = [(v // q ** i) % q for i in range(L)]
            return cls.make(q, pre, [q - 1])
        pre = []
        while s:
            pre.append(s % q)
            s //= q
        return cls.make(q, pre, [0])

    def digit(self, j: int) -> int:
        if j < len(self.preperiod):
            return self.preperiod[j]
        return self.period[(j - len(self.preperiod)) % len(self.period)]

    @property
    def is_finite(self) -> bool:
        return self.period == (0,)

    def to_int(self) -> int:
        if not self.is_finite:
            raise ValueError("digit expansion is not a nonnegative integer")
        return sum(d * self.q ** i for i, d in enumerate(self.preperiod))

    def nonzero_positions(self, limit: int):
        """(position, digit) pairs with position < limit."""
        return [(j, self.digit(j)) for j in range(limit) if self.digit(j)]

    def to_json(self) -> dict:
        return {"q": self.q, "preperiod": list(self.preperiod), "period": list(self.period)}


def digits_of_fraction(c: int, l: int, q: int) -> PadicDigits:
    """Digits of c/(1 - q^l) = c * sum q^(il) for 0 <= c <= q^l - 1."""
    if not 0 <= c <= q ** l - 1:
        raise DigitOutOfRange(f"numerator {c} outside [0, q^l - 1]")
    per = [(c // q ** i) % q for i in range(l)]
    return PadicDigits.make(q, [], per)


# -- Index ----------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Index:
    parts: tuple[int, ...]

    def __post_init__(self):
        if not self.parts or any(s < 1 for s in self.parts):
            raise ValueError("an index needs at least one part, all parts >= 1")

    @classmethod
    def of(cls, *parts) -> Index:
        if len(parts) == 1 and not isinstance(parts[0], int):
            parts = tuple(parts[0])
        return cls(tuple(int(s) for s in parts))

    @classmethod
    def parse(cls, text: str) -> Index:
        return cls(tuple(int(x) for x in text.replace("(", "").replace(")", "").split(",") if x.strip()))

    @property
    def wt(self) -> int:
        return sum(self.parts)

    @property
    def dep(self) -> int:
        return len(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __getitem__(self, i):
        return self.parts[i]

    def __str__(self) -> str:
        return ",".join(map(str, self.parts))


# -- contexts -----------------------------------------------------------------------

def ctx_for(field: FieldCtx, M: int, target=DEFAULT_TARGET) -> LaurentCtx:
    """Laurent context whose default precision is `target` theta-units."""
    return LaurentCtx(field, M, int(target * M))


def eval_ctx(field: FieldCtx, M: int, target=DEFAULT_TARGET, beta=None) -> LaurentCtx:
    """Context whose default series evaluate at t = theta with error >= target."""
    beta = field.q if beta is None else beta
    return LaurentCtx(field, M, math.ceil(Fraction(target) * beta / (beta - 1) * M) + M)


def nt_for(beta, prec_theta, alpha=0) -> int:
    """Truncation order balancing the tail bound against the coefficient precision.

    With coefficient precision P (theta-units) the evaluation error at t = theta is
    min(alpha + (beta - 1) N, P - N); both meet at N = (P - alpha) / beta.
    """
    return max(1, math.ceil((prec_theta - alpha) / beta))


def _theta_inv_power(ctx: LaurentCtx, e: int) -> RamifiedLaurent:
    return theta_power(ctx, -e)


def _binomial_product(ctx: LaurentCtx, const: RamifiedLaurent, factors, N: int, prec) -> list:
    """Dense coefficients of const * prod (1 + a t^m), each truncated below prec."""
    g = [RamifiedLaurent.zero(ctx) for _ in range(N)]
    g[0] = const.truncate(prec)
    top = 0
    for a, m in factors:
        if m >= N:
            continue
        for k in range(min(N - 1, top + m), m - 1, -1):
            src = g[k - m]
            if src.terms:
                g[k] = (g[k] + (a * src)).truncate(prec)
        top = min(N - 1, top + m)
    return [c.truncate(prec) if c.prec > prec else c for c in g]


# -- Omega ----------------------------------------------------------------------------

def omega(ctx: LaurentCtx, l: int = 1, j: int = 0, N_t: int | None = None) -> TateSeries:
    """Omega_l twisted by -j (j <= l; negative j twists forward), from its closed product form.

    Omega_l^(-j) = (-theta)^(-q^(l-j)/(q^l-1)) * prod_{i>=1} (1 - t/theta^(q^(il-j))).
    """
    q, M = ctx.q, ctx.M
    if j > l:
        raise RamificationTooSmall("twists below -l need fractional theta powers")
    if M % (q ** l - 1):
        raise RamificationTooSmall(f"M={M} is not divisible by q^{l}-1")
    cexp = Fraction(q ** (l - j), q ** l - 1)
    const = RamifiedLaurent.monomial(ctx, int(cexp * M))
    beta = Fraction(q ** (l - j))
    prec = ctx.prec
    if N_t is None:
        N_t = nt_for(beta, Fraction(prec, M), cexp)
    factors = []
    i = 1
    while int(cexp * M) + q ** (i * l - j) * M < prec:
        factors.append((-_theta_inv_power(ctx, q ** (i * l - j)), 1))
        i += 1
    coeffs = _binomial_product(ctx, const, factors, N_t, prec)
    tail = TailCertificate("super-geometric", cexp, beta)
    return TateSeries(ctx, dict(enumerate(coeffs)), prec, N_t, tail)


def omega_product(ctx: LaurentCtx, l: int, N_t: int | None = None) -> TateSeries:
    """Omega_l * Omega_l^(-1) * ... * Omega_l^(-l+1)."""
    out = None
    for j in range(l):
        f = omega(ctx, l, j, N_t)
        out = f if out is None else out * f
    return out


# -- D polynomials and G ------------------------------------------------------------

def bbD(ctx: LaurentCtx, i: int) -> TateSeries:
    """prod_{k<i} (1 - t^(q^k) / theta^(q^i)) as an exact polynomial."""
    q = ctx.q
    out = TateSeries.one(ctx)
    a = -_theta_inv_power(ctx, q ** i)
    for k in range(i):
        out = out * TateSeries(ctx, {0: RamifiedLaurent.one(ctx), q ** k: a})
    return out


def bbD_recursive(ctx: LaurentCtx, i: int) -> TateSeries:
    """Same polynomial via D_i = (1 - t/theta^(q^i)) D_(i-1)^q."""
    if i == 0:
        return TateSeries.one(ctx)
    q = ctx.q
    lin = TateSeries(ctx, {0: RamifiedLaurent.one(ctx), 1: -_theta_inv_power(ctx, q ** i)})
    return lin * bbD_recursive(ctx, i - 1) ** q


def gfun(ctx: LaurentCtx, s: PadicDigits, N_t: int | None = None) -> TateSeries:
    """The deformation series G(s) = prod_n D_n^(s_n)."""
    q, M = ctx.q, ctx.M
    prec = ctx.prec
    if N_t is None:
        N_t = nt_for(q, Fraction(prec, M))
    factors = []
    n = 1
    while q ** n * M < prec:
        sn = s.digit(n)
        if sn:
            a = -_theta_inv_power(ctx, q ** n)
            for k in range(n):
                if q ** k < N_t:
                    factors.extend([(a, q ** k)] * sn)
        n += 1
    coeffs = _binomial_product(ctx, RamifiedLaurent.one(ctx), factors, N_t, prec)
    return TateSeries(ctx, dict(enumerate(coeffs)), prec, N_t,
                      TailCertificate("super-geometric", Fraction(0), Fraction(q)))


def gamma_arith(ctx: LaurentCtx, s: PadicDigits) -> RamifiedLaurent:
    """Gamma(s) = prod_n prod_{k<n} (1 - theta^(q^k - q^n))^(s_n) in k_infinity."""
    q, M = ctx.q, ctx.M
    prec = ctx.prec
    out = RamifiedLaurent.one(ctx)
    n = 1
    while (q ** n - q ** (n - 1)) * M < prec:
        sn = s.digit(n)
        for k in range(n):
            if sn and (q ** n - q ** k) * M < prec:
                fac = RamifiedLaurent.one(ctx) - theta_power(ctx, q ** k - q ** n)
                for _ in range(sn):
                    out = (out * fac).truncate(prec)
        n += 1
    return out.truncate(prec)


def gamma_carlitz(ctx: LaurentCtx, s: int) -> RamifiedLaurent:
    """Gamma_C(s) = prod_i prod_{j<i} (theta^(q^i) - theta^(q^j))^(s_i), exact."""
    if s < 1:
        raise ValueError("Carlitz gamma needs s >= 1")
    q = ctx.q
    out = RamifiedLaurent.one(ctx)
    i = 0
    while s:
        si = s % q
        for j in range(i):
            fac = theta_power(ctx, q ** i) - theta_power(ctx, q ** j)
            for _ in range(si):
                out = out * fac
        s //= q
        i += 1
    return out


def carlitz_factorial(ctx: LaurentCtx, n: int) -> RamifiedLaurent:
    """Carlitz factorial of n >= 0, i.e. gamma_carlitz(n) for n >= 1 and 1 for n = 0."""
    return RamifiedLaurent.one(ctx) if n == 0 else gamma_carlitz(ctx, n)


# -- zeta values ----------------------------------------------------------------------

def _monic_polys(ctx: LaurentCtx, d: int):
    F = ctx.field
    # coefficients run over F_q (the Frobenius-fixed subfield of the context field)
    fq = [c for c in range(F.size) if F.in_subfield(c, 1)]
    for tail in itertools.product(fq, repeat=d):
        coeffs = {d: 1}
        for k, c in enumerate(tail):
            if c:
                coeffs[k] = c
        yield coeffs


@lru_cache(maxsize=None)
def _power_sum(ctx_key, d: int, s: int, prec: int) -> RamifiedLaurent:
    ctx = _CTX_REGISTRY[ctx_key]
    total = RamifiedLaurent.zero(ctx)
    for coeffs in _monic_polys(ctx, d):
        a = theta_poly(ctx, coeffs)
        inv = rl_inv(a, prec)
        term = (inv ** s).truncate(prec)
        total = (total + term).truncate(prec)
    return total.truncate(prec)


_CTX_REGISTRY: dict = {}


def _ctx_key(ctx: LaurentCtx):
    key = (ctx.field.p, ctx.field.e, ctx.field.L, tuple(ctx.field.modulus), ctx.M)
    _CTX_REGISTRY.setdefault(key, LaurentCtx(ctx.field, ctx.M, ctx.prec))
    return key


def power_sum(ctx: LaurentCtx, d: int, s: int, prec: int) -> RamifiedLaurent:
    """S_d(s) = sum over monic a of degree d of a^(-s), to absolute precision prec (u-units)."""
    return _power_sum(_ctx_key(ctx), d, s, int(prec))


def carlitz_zeta(ctx: LaurentCtx, s: int, D_max: int):
    """Partial sum over degrees <= D_max with the tail bound (D_max + 1) * s."""
    if s < 1:
        raise ValueError("zeta needs s >= 1")
    err = (D_max + 1) * s
    prec = err * ctx.M
    total = RamifiedLaurent.zero(ctx)
    for d in range(D_max + 1):
        total = total + power_sum(ctx, d, s, prec)
    return total.truncate(prec), Valuation.of(err)


def mzv(ctx: LaurentCtx, s: Index, D_max: int):
    """Multiple zeta value over degree tuples d_1 > ... > d_r with d_1 <= D_max."""
    r = s.dep
    err = (D_max + 1) * s[0] + sum((r - 1 - i) * s[i] for i in range(1, r))
    prec = err * ctx.M
    total = RamifiedLaurent.zero(ctx)
    if D_max + 1 < r:
        return total.truncate(prec), Valuation.of(err)
    # cum[d] = sum over tuples for parts i..r-1 with leading degree < d
    cum = [RamifiedLaurent.one(ctx)] * (D_max + 2)
    for i in range(r - 1, -1, -1):
        new = [RamifiedLaurent.zero(ctx)] * (D_max + 2)
        acc = RamifiedLaurent.zero(ctx)
        for d in range(D_max + 1):
            prev = cum[d] if i < r - 1 else RamifiedLaurent.one(ctx)
            if i < r - 1 and not prev.terms:
                new[d + 1] = acc
                continue
            acc = (acc + power_sum(ctx, d, s[i], prec) * prev).truncate(prec)
            new[d + 1] = acc
        cum = new
    total = cum[D_max + 1]
    return total.truncate(prec), Valuation.of(err)


# -- Carlitz period -------------------------------------------------------------------

def carlitz_pi(ctx: LaurentCtx) -> RamifiedLaurent:
    """(-theta)^(q/(q-1)) * prod_{i>=1} (1 - theta^(1-q^i))^(-1)."""
    q, M = ctx.q, ctx.M
    if M % (q - 1):
        raise RamificationTooSmall(f"M={M} is not divisible by q-1")
    prec = ctx.prec
    lead = RamifiedLaurent.monomial(ctx, -M * q // (q - 1))
    rel = prec + M * q // (q - 1)
    prod = RamifiedLaurent.one(ctx)
    i = 1
    while (q ** i - 1) * M < rel:
        prod = (prod * (RamifiedLaurent.one(ctx) - theta_power(ctx, 1 - q ** i))).truncate(rel)
        i += 1
    return (lead * rl_inv(prod.truncate(rel), rel)).truncate(prec)


# -- weights --------------------------------------------------------------------------

class WeightProvider:
    """Polynomials u_i in A[t], each given as {(t-degree, theta-degree): F_p integer}."""

    def __init__(self, kind: str, q: int, table: dict[int, dict] | None = None, max_index=None):
        self.kind = kind
        self.q = q
        self.table = table or {}
        self.max_index = max_index
        for i in self.table:
            self.validate(i)

    def poly(self, i: int) -> dict[tuple[int, int], int]:
        if i < 1:
            raise ValueError("weights are indexed from 1")
        if i in self.table:
            return self.table[i]
        if self.kind == "constant-one":
            return {(0, 0): 1}
        if self.kind == "anderson-thakur" and i <= self.q:
            return {(0, 0): 1}
        raise ATRangeUnsupported(f"no weight polynomial available for index {i}")

    def norm_valuation(self, i: int) -> Fraction:
        """Minimal theta-valuation of the coefficients of u_i."""
        degs = [b for (_, b), c in self.poly(i).items() if c]
        return Fraction(-max(degs)) if degs else Fraction(10 ** 9)

    def t_degree(self, i: int) -> int:
        degs = [a for (a, _), c in self.poly(i).items() if c]
        return max(degs) if degs else 0

    def validate(self, i: int) -> None:
        if self.norm_valuation(i) <= Fraction(-i * self.q, self.q - 1):
            raise WeightBoundViolated(f"weight u_{i} is too large")

    def series(self, ctx: LaurentCtx, i: int) -> TateSeries:
        self.validate(i)
        by_t: dict[int, dict[int, int]] = {}
        for (a, b), c in self.poly(i).items():
            by_t.setdefault(a, {})[b] = c
        return TateSeries(ctx, {a: theta_poly(ctx, cs) for a, cs in by_t.items()})

    def to_json(self) -> dict:
        return {"kind": self.kind, "q": self.q,
                "table": {str(i): [[a, b, c] for (a, b), c in sorted(p.items())] for i, p in self.table.items()}}


def at_weights(kind: str, q: int, path: str | None = None) -> WeightProvider:
    if kind in ("constant-one", "anderson-thakur"):
        return WeightProvider(kind, q)
    if kind == "user-file":
        with open(path) as fh:
            data = json.load(fh)
        table = {int(i): {(int(a), int(b)): int(c) for a, b, c in terms} for i, terms in data.items()}
        return WeightProvider("user-file", q, table)
    raise ValueError(f"unknown weight kind {kind!r}")


# -- Anderson-Thakur and completed series ---------------------------------------------

def inv_bbL_series(ctx: LaurentCtx, imax: int, N_t: int) -> list[TateSeries]:
    """[1/L_0, ..., 1/L_imax] with L_i = (t - theta^q)...(t - theta^(q^i))."""
    q = ctx.q
    out = [TateSeries.one(ctx).truncate_t(N_t)]
    cur = TateSeries.one(ctx)
    for k in range(1, imax + 1):
        c = -_theta_inv_power(ctx, q ** k)
        # 1/(t - theta^(q^k)) = c / (1 + c t)
        cur = ts_div_binomial(cur, c, 1, N_t).scale(c)
        out.append(cur)
    return out


def _twist_weight(ctx: LaurentCtx, w: TateSeries, i: int) -> TateSeries:
    return ts_twist(w, i) if i else w


def at_series(ctx: LaurentCtx, s: Index, weights: WeightProvider, N_t: int | None = None) -> TateSeries:
    """sum over i_1 > ... > i_d >= 0 of prod u_(s_k)^(i_k) / L_(i_k)^(s_k)."""
    q, M = ctx.q, ctx.M
    target = Fraction(ctx.prec, M)
    if N_t is None:
        N_t = nt_for(q, target)
    for sk in s.parts:
        weights.poly(sk)
        weights.validate(sk)
    smin = min(s.parts)
    # valuation of 1/L_i^s is s*(q^(i+1)-q)/(q-1); stop once it passes the precision
    imax = 0
    while smin * (q ** (imax + 1) - q) // (q - 1) < target + q * max(weights.t_degree(x) for x in s.parts):
        imax += 1
    imax += s.dep
    inv = inv_bbL_series(ctx, imax, N_t)
    u = {sk: weights.series(ctx, sk) for sk in set(s.parts)}

    def term(k: int, i: int) -> TateSeries:
        sk = s[k]
        return _twist_weight(ctx, u[sk], i) * inv[i] ** sk

    d = s.dep
    # cum[i] = sum over i_(k+1) > ... > i_d >= 0 with i_(k+1) < i
    cum = None
    for k in range(d - 1, -1, -1):
        new = [None] * (imax + 2)
        acc = None
        for i in range(imax + 1):
            new[i] = acc
            if k < d - 1:
                if cum[i] is None:
                    continue
                piece = term(k, i) * cum[i]
            else:
                piece = term(k, i)
            acc = piece if acc is None else acc + piece
        new[imax + 1] = acc
        cum = new
    out = cum[imax + 1]
    return out if out is not None else TateSeries.zero(ctx)


def cmpl_L(ctx: LaurentCtx, s: Index, j: int, l: int, weights: WeightProvider,
           N_t: int | None = None, omega_series: TateSeries | None = None) -> TateSeries:
    """Nested sum over i_l > ... > i_(j-1) >= 0 of prod (Omega^(s_k) u_(s_k))^(i_k), k = l..j-1."""
    d = s.dep
    if not 1 <= l <= j <= d + 1:
        raise ValueError("need 1 <= l <= j <= dep + 1")
    q, M = ctx.q, ctx.M
    target = Fraction(ctx.prec, M)
    if N_t is None:
        N_t = nt_for(q, target)
    if j == l:
        return TateSeries.one(ctx)
    parts = [s[k - 1] for k in range(l, j)]
    for sk in parts:
        weights.validate(sk)
    om = omega_series if omega_series is not None else omega(ctx, 1, 0, N_t)
    base = {}
    for sk in set(parts):
        base[sk] = (om ** sk) * weights.series(ctx, sk)
    # twist depth: the twisted factor valuation grows like q^i * s*q/(q-1)
    smin = min(parts)
    imax = 0
    while q ** imax * Fraction(smin * q, q - 1) + min(weights.norm_valuation(x) for x in parts) * q ** imax < target:
        imax += 1
    imax += len(parts)
    twisted: dict[tuple[int, int], TateSeries] = {}

    def tw(sk: int, i: int) -> TateSeries:
        key = (sk, i)
        if key not in twisted:
            twisted[key] = ts_twist(base[sk], i).truncate_t(N_t) if i else base[sk].truncate_t(N_t)
        return twisted[key]

    # parts[0] carries the largest twist i_l, parts[-1] the smallest i_(j-1)
    r = len(parts)
    cum = None
    for k in range(r - 1, -1, -1):
        new = [None] * (imax + 2)
        acc = None
        for i in range(imax + 1):
            new[i] = acc
            if k < r - 1:
                if cum[i] is None:
                    continue
                piece = tw(parts[k], i) * cum[i]
            else:
                piece = tw(parts[k], i)
            acc = piece if acc is None else acc + piece
        new[imax + 1] = acc
        cum = new
    return cum[imax + 1]

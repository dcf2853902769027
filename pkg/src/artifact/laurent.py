"""Truncated Laurent series in a ramified uniformizer u with u^(-M) = -theta.

An element sum c_m u^m stands for sum c_m (-theta)^(-m/M).  With |theta| = q
the valuation of u^m is m/M theta-units.  Every value carries an absolute
precision: all exponents >= prec are unknown.  Exact values use prec = INF.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (ContextMismatch, InseparableOperand, NegativeTwistUnrepresentable,
                     RamificationTooSmall, ZeroDivisor)
from .ffield import FFElem, FieldCtx, lucas_binom

INF = math.inf


def _ceil_div(a, b: int):
    if a == INF:
        return INF
    return -((-a) // b)


@dataclass(frozen=True)
class Valuation:
    """m/M theta-units, so |x| = q^(-m/M); `infinite` marks zero to all known digits."""

    m: int = 0
    M: int = 1
    infinite: bool = False

    @classmethod
    def inf(cls) -> Valuation:
        return cls(0, 1, True)

    @classmethod
    def of(cls, value) -> Valuation:
        if value == INF:
            return cls.inf()
        value = Fraction(value)
        return cls(value.numerator, value.denominator)

    @property
    def value(self):
        return INF if self.infinite else Fraction(self.m, self.M)

    def __lt__(self, other):
        return self.value < _vvalue(other)

    def __le__(self, other):
        return self.value <= _vvalue(other)

    def __gt__(self, other):
        return self.value > _vvalue(other)

    def __ge__(self, other):
        return self.value >= _vvalue(other)

    def __eq__(self, other):
        if isinstance(other, (Valuation, int, Fraction, float)):
            return self.value == _vvalue(other)
        return NotImplemented

    def __hash__(self):
        return hash(self.value)

    def __str__(self) -> str:
        if self.infinite:
            return "inf"
        v = Fraction(self.m, self.M)
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"

    def to_json(self):
        return "inf" if self.infinite else str(self)


def _vvalue(x):
    return x.value if isinstance(x, Valuation) else x


class LaurentCtx:
    """Coefficient field, ramification M and a default precision (u-exponent)."""

    def __init__(self, field: FieldCtx, M: int = 1, prec: int | None = None):
        if M < 1:
            raise ValueError("M must be positive")
        self.field = field
        self.M = M
        self.prec = prec if prec is not None else 200 * M

    @property
    def q(self) -> int:
        return self.field.q

    @property
    def p(self) -> int:
        return self.field.p

    def with_prec(self, prec: int) -> LaurentCtx:
        return LaurentCtx(self.field, self.M, prec)

    def same(self, other: LaurentCtx) -> bool:
        return self.field == other.field and self.M == other.M

    def __repr__(self) -> str:
        return f"LaurentCtx({self.field!r}, M={self.M}, prec={self.prec})"


class RamifiedLaurent:
    """Sparse truncated Laurent series: {exponent: field code} plus precision."""

    __slots__ = ("ctx", "terms", "prec")

    def __init__(self, ctx: LaurentCtx, terms: dict[int, int] | None = None, prec=INF):
        self.ctx = ctx
        self.prec = prec
        if terms:
            if prec == INF:
                self.terms = {m: c for m, c in terms.items() if c}
            else:
                self.terms = {m: c for m, c in terms.items() if c and m < prec}
        else:
            self.terms = {}

    # -- constructors -------------------------------------------------------------
    @classmethod
    def zero(cls, ctx: LaurentCtx, prec=INF) -> RamifiedLaurent:
        return cls(ctx, {}, prec)

    @classmethod
    def one(cls, ctx: LaurentCtx) -> RamifiedLaurent:
        return cls(ctx, {0: 1})

    @classmethod
    def const(cls, ctx: LaurentCtx, c) -> RamifiedLaurent:
        code = c.code if isinstance(c, FFElem) else ctx.field.scalar(c)
        return cls(ctx, {0: code})

    @classmethod
    def monomial(cls, ctx: LaurentCtx, m: int, c=1) -> RamifiedLaurent:
        code = c.code if isinstance(c, FFElem) else ctx.field.scalar(c)
        return cls(ctx, {m: code})

    @classmethod
    def theta(cls, ctx: LaurentCtx) -> RamifiedLaurent:
        return theta_power(ctx, 1)

    # -- basic queries ------------------------------------------------------------
    @property
    def exact(self) -> bool:
        return self.prec == INF

    def vexp(self):
        """Minimal exponent, or the precision when no coefficient is known."""
        return min(self.terms) if self.terms else self.prec

    def valuation(self) -> Valuation:
        v = self.vexp()
        if v == INF:
            return Valuation.inf()
        return Valuation(v, self.ctx.M)

    def is_zero(self) -> bool:
        """True when zero to the known precision."""
        return not self.terms

    def coeff(self, m: int) -> FFElem:
        return FFElem(self.ctx.field, self.terms.get(m, 0))

    def leading(self) -> tuple[int, int]:
        m = min(self.terms)
        return m, self.terms[m]

    def _check(self, other: RamifiedLaurent) -> None:
        if not self.ctx.same(other.ctx):
            raise ContextMismatch("series live in different contexts")

    def _coerce(self, other) -> RamifiedLaurent:
        if isinstance(other, RamifiedLaurent):
            self._check(other)
            return other
        return RamifiedLaurent.const(self.ctx, other)

    # -- ring operations ---------------------------------------------------------
    def __add__(self, other) -> RamifiedLaurent:
        other = self._coerce(other)
        prec = min(self.prec, other.prec)
        F = self.ctx.field
        out = {m: c for m, c in self.terms.items() if m < prec}
        if F.prime:
            p = F.p
            for m, c in other.terms.items():
                if m < prec:
                    out[m] = (out.get(m, 0) + c) % p
        else:
            for m, c in other.terms.items():
                if m < prec:
                    out[m] = F.add(out.get(m, 0), c)
        return RamifiedLaurent(self.ctx, out, prec)

    __radd__ = __add__

    def __neg__(self) -> RamifiedLaurent:
        F = self.ctx.field
        return RamifiedLaurent(self.ctx, {m: F.neg(c) for m, c in self.terms.items()}, self.prec)

    def __sub__(self, other) -> RamifiedLaurent:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> RamifiedLaurent:
        return self._coerce(other) - self

    def __mul__(self, other) -> RamifiedLaurent:
        if not isinstance(other, RamifiedLaurent):
            return self.scale(other)
        self._check(other)
        prec = min(self.prec + other.vexp(), other.prec + self.vexp())
        return RamifiedLaurent(self.ctx, _mul_terms(self.ctx.field, self.terms, other.terms, prec), prec)

    def __rmul__(self, other) -> RamifiedLaurent:
        return self.scale(other)

    def scale(self, c) -> RamifiedLaurent:
        F = self.ctx.field
        code = c.code if isinstance(c, FFElem) else F.scalar(c)
        if code == 0:
            return RamifiedLaurent(self.ctx, {}, INF)
        return RamifiedLaurent(self.ctx, {m: F.mul(a, code) for m, a in self.terms.items()}, self.prec)

    def shift(self, k: int) -> RamifiedLaurent:
        """Multiply by u^k."""
        return RamifiedLaurent(self.ctx, {m + k: c for m, c in self.terms.items()}, self.prec + k)

    def truncate(self, prec) -> RamifiedLaurent:
        return RamifiedLaurent(self.ctx, self.terms, min(prec, self.prec))

    def inverse(self, prec=None) -> RamifiedLaurent:
        return rl_inv(self, prec)

    def __truediv__(self, other) -> RamifiedLaurent:
        if not isinstance(other, RamifiedLaurent):
            F = self.ctx.field
            code = other.code if isinstance(other, FFElem) else F.scalar(other)
            return self.scale(FFElem(F, F.inv(code)))
        return self * rl_inv(other)

    def __pow__(self, k: int) -> RamifiedLaurent:
        if k < 0:
            return rl_inv(self) ** (-k)
        result = RamifiedLaurent.one(self.ctx)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def frobenius(self, n: int, widen: bool = False) -> RamifiedLaurent:
        return rl_frobenius(self, n, widen)

    def theta_hyperderiv(self, n: int) -> RamifiedLaurent:
        return rl_theta_hyperderiv(self, n)

    def rescale(self, M: int) -> RamifiedLaurent:
        """Re-express in the context with ramification M (a multiple of ours)."""
        if M % self.ctx.M:
            raise RamificationTooSmall(f"{M} is not a multiple of {self.ctx.M}")
        f = M // self.ctx.M
        ctx = LaurentCtx(self.ctx.field, M, self.ctx.prec * f)
        return RamifiedLaurent(ctx, {m * f: c for m, c in self.terms.items()}, self.prec * f)

    def with_ctx(self, ctx: LaurentCtx) -> RamifiedLaurent:
        if ctx.M != self.ctx.M:
            return self.rescale(ctx.M).with_ctx(ctx)
        if ctx.field != self.ctx.field:
            raise ContextMismatch("cannot change coefficient field")
        return RamifiedLaurent(ctx, self.terms, self.prec)

    # -- comparison --------------------------------------------------------------
    def agrees(self, other: RamifiedLaurent) -> bool:
        return (self - other).is_zero()

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, FFElem)):
            other = RamifiedLaurent.const(self.ctx, other)
        if not isinstance(other, RamifiedLaurent):
            return NotImplemented
        return self.ctx.same(other.ctx) and self.agrees(other)

    __hash__ = None

    def __repr__(self) -> str:
        items = sorted(self.terms.items())[:6]
        body = " + ".join(f"{c}*u^{m}" for m, c in items) or "0"
        more = " + ..." if len(self.terms) > 6 else ""
        return f"RL({body}{more}, prec={self.prec}, M={self.ctx.M})"

    # -- serialization ----------------------------------------------------------
    def to_json(self) -> dict:
        F = self.ctx.field
        data = F.to_json()
        data.update({
            "M": self.ctx.M,
            "prec": "inf" if self.exact else int(self.prec),
            "terms": [[m, F.coords(c)] for m, c in sorted(self.terms.items())],
        })
        return data

    @classmethod
    def from_json(cls, data: dict, ctx: LaurentCtx | None = None) -> RamifiedLaurent:
        if ctx is None:
            ctx = LaurentCtx(FieldCtx.from_json(data), data["M"])
        F = ctx.field
        prec = INF if data["prec"] == "inf" else int(data["prec"])
        return cls(ctx, {int(m): F.encode(c) for m, c in data["terms"]}, prec)


def _mul_dense(F: FieldCtx, a: dict, b: dict, cutoff, g: int, amin: int, bmin: int) -> dict:
    """Product via numpy convolution on the lattices amin + g*k and bmin + g*k."""
    p, n = F.p, F.n
    span = cutoff - amin - bmin if cutoff != INF else None
    la = (max(a) - amin) // g + 1
    lb = (max(b) - bmin) // g + 1
    if span is not None:
        la = min(la, -(-span // g))
        lb = min(lb, -(-span // g))

    def coords(d: dict, lo: int, length: int):
        arr = np.zeros((n, length), dtype=np.int64)
        for m, c in d.items():
            k = (m - lo) // g
            if k < length:
                if n == 1:
                    arr[0, k] = c
                else:
                    for i, x in enumerate(F.coords(c)):
                        arr[i, k] = x
        return arr

    A, B = coords(a, amin, la), coords(b, bmin, lb)
    conv = np.zeros((2 * n - 1, la + lb - 1), dtype=np.int64)
    for i in range(n):
        if not A[i].any():
            continue
        for j in range(n):
            if B[j].any():
                conv[i + j] += np.convolve(A[i], B[j]) % p
    conv %= p
    mod = F.modulus
    for k in range(2 * n - 2, n - 1, -1):
        row = conv[k]
        if row.any():
            for t in range(n):
                if mod[t]:
                    conv[k - n + t] = (conv[k - n + t] - mod[t] * row) % p
    codes = conv[0].copy()
    for i in range(1, n):
        codes += conv[i] * p ** i
    base = amin + bmin
    out = {}
    for k in np.nonzero(codes)[0].tolist():
        m = base + g * k
        if m < cutoff:
            out[m] = int(codes[k])
    return out


def _lattice_step(d: dict, lo: int) -> int:
    return math.gcd(*[m - lo for m in d])


def _mul_terms(F: FieldCtx, a: dict, b: dict, cutoff) -> dict:
    if not a or not b:
        return {}
    work = len(a) * len(b)
    if work > 256:
        amin, bmin = min(a), min(b)
        g = math.gcd(_lattice_step(a, amin), _lattice_step(b, bmin)) or 1
        dense = ((max(a) - amin) // g + 1) * ((max(b) - bmin) // g + 1)
        if dense <= 64 * work:
            return _mul_dense(F, a, b, cutoff, g, amin, bmin)
    bs = sorted(b.items())
    out: dict[int, int] = {}
    if F.prime:
        for ma, ca in a.items():
            lim = cutoff - ma
            for mb, cb in bs:
                if mb >= lim:
                    break
                m = ma + mb
                out[m] = out.get(m, 0) + ca * cb
        p = F.p
        return {m: c % p for m, c in out.items() if c % p}
    add, mul = F.add, F.mul
    for ma, ca in a.items():
        lim = cutoff - ma
        for mb, cb in bs:
            if mb >= lim:
                break
            m = ma + mb
            out[m] = add(out.get(m, 0), mul(ca, cb))
    return out


def theta_power(ctx: LaurentCtx, k: int) -> RamifiedLaurent:
    """theta^k = (-1)^k (-theta)^k = (-1)^k u^(-kM), exact."""
    sign = 1 if k % 2 == 0 else -1
    return RamifiedLaurent.monomial(ctx, -k * ctx.M, sign)


def theta_poly(ctx: LaurentCtx, coeffs: dict[int, int]) -> RamifiedLaurent:
    """Exact element sum c_k theta^k from integer coefficients."""
    out = RamifiedLaurent.zero(ctx)
    for k, c in coeffs.items():
        out = out + theta_power(ctx, k).scale(c)
    return out


def rl_const_theta_power(a_num: int, a_den: int, ctx: LaurentCtx) -> RamifiedLaurent:
    """The fixed root (-theta)^(a_num/a_den) as the monomial u^(-a M)."""
    a = Fraction(a_num, a_den)
    if ctx.M % a.denominator:
        raise RamificationTooSmall(f"denominator {a.denominator} does not divide M={ctx.M}")
    return RamifiedLaurent.monomial(ctx, -a.numerator * (ctx.M // a.denominator), 1)


def rl_add(x: RamifiedLaurent, y: RamifiedLaurent) -> RamifiedLaurent:
    return x + y


def rl_mul(x: RamifiedLaurent, y: RamifiedLaurent) -> RamifiedLaurent:
    return x * y


def rl_inv(x: RamifiedLaurent, prec=None) -> RamifiedLaurent:
    """Inverse by leading-monomial inversion and Newton iteration.

    The result has precision x.prec - 2 v(x), capped by `prec` (or the
    context default when x is exact).
    """
    if x.is_zero():
        raise ZeroDivisor("no known nonzero coefficient")
    ctx, F = x.ctx, x.ctx.field
    m0, c0 = x.leading()
    target = x.prec - 2 * m0
    cap = prec if prec is not None else (ctx.prec if x.exact else INF)
    target = min(target, cap)
    c_inv = F.inv(c0)
    # z = x / (c0 u^m0) = 1 + y with v(y) > 0
    z = {m - m0: F.mul(c, c_inv) for m, c in x.terms.items()}
    if len(z) == 1:
        mono_prec = x.prec - 2 * m0 if prec is None else min(x.prec - 2 * m0, prec)
        return RamifiedLaurent(ctx, {-m0: c_inv}, mono_prec)
    rel = target + m0  # relative precision needed for 1/z
    if rel <= 0:
        return RamifiedLaurent(ctx, {}, target)
    w = {0: 1}
    have = min(k for k in z if k > 0)
    while have < rel:
        new = min(2 * have, rel)
        zw = _mul_terms(F, z, w, new)
        corr = {m: F.neg(c) for m, c in zw.items()}
        corr[0] = F.add(corr.get(0, 0), F.scalar(2))
        w = _mul_terms(F, w, corr, new)
        have = new
    w = {m: c for m, c in w.items() if m < rel}
    return RamifiedLaurent(ctx, {m - m0: F.mul(c, c_inv) for m, c in w.items()}, target)


def rl_frobenius(x: RamifiedLaurent, n: int, widen: bool = False) -> RamifiedLaurent:
    """x^(q^n): coefficients go through Frobenius, exponents scale by q^n.

    For n < 0 the exponents must be divisible by q^|n|, or `widen` re-expresses
    the result with ramification M q^|n|.
    """
    ctx, F = x.ctx, x.ctx.field
    if n == 0:
        return x
    if n > 0:
        Q = ctx.q ** n
        return RamifiedLaurent(ctx, {m * Q: F.frob(c, n) for m, c in x.terms.items()}, x.prec * Q)
    Q = ctx.q ** (-n)
    if all(m % Q == 0 for m in x.terms):
        return RamifiedLaurent(ctx, {m // Q: F.frob(c, n) for m, c in x.terms.items()},
                               _ceil_div(x.prec, Q))
    if not widen:
        raise NegativeTwistUnrepresentable(
            f"exponents not divisible by {Q}; a ramification widening is required")
    wide = LaurentCtx(F, ctx.M * Q, ctx.prec * Q)
    return RamifiedLaurent(wide, {m: F.frob(c, n) for m, c in x.terms.items()}, x.prec)


def rl_theta_hyperderiv(x: RamifiedLaurent, n: int) -> RamifiedLaurent:
    """n-th hyperderivative in theta, termwise on (-theta)^a with a = -m/M."""
    ctx, F = x.ctx, x.ctx.field
    if ctx.M % ctx.p == 0:
        raise InseparableOperand(f"M={ctx.M} is divisible by p={ctx.p}")
    if n == 0:
        return x
    M, p = ctx.M, ctx.p
    sign = 1 if n % 2 == 0 else p - 1
    out = {}
    for m, c in x.terms.items():
        b = lucas_binom(Fraction(-m, M), n, p) * sign % p
        if b:
            out[m + n * M] = F.mul(c, b)
    return RamifiedLaurent(ctx, out, x.prec + n * M)


def rl_norm(x: RamifiedLaurent) -> Valuation:
    return x.valuation()

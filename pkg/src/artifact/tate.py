"""Power series in t with RamifiedLaurent coefficients, truncated at t^N.

Coefficients i < N are known (each to its own precision); coefficients
i >= N are either absent (exact polynomials, N = INF) or bounded by a tail
certificate v(a_i) >= alpha + beta*i in theta-units.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.signal import fftconvolve

from .errors import ContextMismatch, DivergentTail, NotAUnit
from .ffield import FFElem, lucas_binom
from .laurent import INF, LaurentCtx, RamifiedLaurent, Valuation, rl_inv, theta_power


@dataclass(frozen=True)
class TailCertificate:
    """Bound v(a_i) >= alpha + beta * i (theta-units) for every omitted index i."""

    kind: str
    alpha: Fraction
    beta: Fraction

    def bound(self, i: int) -> Fraction:
        return self.alpha + self.beta * i

    def to_json(self) -> dict:
        return {"kind": self.kind, "params": {"alpha": str(self.alpha), "beta": str(self.beta)}}

    @classmethod
    def from_json(cls, data: dict | None) -> TailCertificate | None:
        if not data:
            return None
        return cls(data["kind"], Fraction(data["params"]["alpha"]), Fraction(data["params"]["beta"]))


def _combine_kind(*tails) -> str:
    kinds = {t.kind for t in tails if t is not None}
    return "super-geometric" if kinds == {"super-geometric"} else "geometric"


class TateSeries:
    """Truncated series sum a_i t^i over a LaurentCtx."""

    __slots__ = ("ctx", "coeffs", "prec", "N", "tail")

    def __init__(self, ctx: LaurentCtx, coeffs: dict[int, RamifiedLaurent] | None = None,
                 prec=INF, N=INF, tail: TailCertificate | None = None):
        self.ctx = ctx
        self.prec = prec
        self.N = N
        self.tail = tail if N != INF else None
        store = {}
        if coeffs:
            for i, c in coeffs.items():
                if i < N and (c.terms or c.prec < prec):
                    store[i] = c if c.prec <= prec else c.truncate(prec)
        self.coeffs = store

    # -- constructors -------------------------------------------------------------
    @classmethod
    def zero(cls, ctx: LaurentCtx) -> TateSeries:
        return cls(ctx)

    @classmethod
    def const(cls, ctx: LaurentCtx, c) -> TateSeries:
        if not isinstance(c, RamifiedLaurent):
            c = RamifiedLaurent.const(ctx, c)
        return cls(ctx, {0: c}, prec=INF if c.exact else c.prec)

    @classmethod
    def one(cls, ctx: LaurentCtx) -> TateSeries:
        return cls.const(ctx, 1)

    @classmethod
    def t_power(cls, ctx: LaurentCtx, k: int, c=None) -> TateSeries:
        c = RamifiedLaurent.one(ctx) if c is None else c
        return cls(ctx, {k: c})

    @classmethod
    def poly(cls, ctx: LaurentCtx, coeffs: dict[int, RamifiedLaurent] | list) -> TateSeries:
        if isinstance(coeffs, list):
            coeffs = dict(enumerate(coeffs))
        return cls(ctx, coeffs)

    @classmethod
    def t_minus_theta_power(cls, ctx: LaurentCtx, j: int = 0) -> TateSeries:
        """t - theta^(q^j)."""
        return cls(ctx, {0: -theta_power(ctx, ctx.q ** j), 1: RamifiedLaurent.one(ctx)})

    # -- queries ------------------------------------------------------------------
    @property
    def exact(self) -> bool:
        return self.N == INF and self.prec == INF and all(c.exact for c in self.coeffs.values())

    def coef(self, i: int) -> RamifiedLaurent:
        if i >= self.N:
            raise IndexError(f"coefficient t^{i} is beyond the truncation order {self.N}")
        c = self.coeffs.get(i)
        return c if c is not None else RamifiedLaurent(self.ctx, {}, self.prec)

    def degree(self) -> int:
        return max(self.coeffs) if self.coeffs else -1

    def indices(self):
        return sorted(self.coeffs)

    def _missing(self) -> bool:
        if self.N == INF:
            return False
        return len(self.coeffs) < self.N

    def known_vexp(self):
        """Minimal u-exponent over the known coefficients (precision counts as a bound)."""
        best = INF
        for c in self.coeffs.values():
            best = min(best, c.vexp())
        if self._missing():
            best = min(best, self.prec)
        return best

    def known_valuation(self) -> Valuation:
        v = self.known_vexp()
        return Valuation.inf() if v == INF else Valuation(v, self.ctx.M)

    def _check(self, other: TateSeries) -> None:
        if not self.ctx.same(other.ctx):
            raise ContextMismatch("series live in different contexts")

    def _envelope(self, beta):
        """alpha with v(a_i) >= alpha + beta*i for all i, or None if unbounded."""
        M = self.ctx.M
        alpha = INF
        for i, c in self.coeffs.items():
            v = c.vexp()
            if v != INF:
                alpha = min(alpha, Fraction(v, M) - beta * i)
        if self.N == INF:
            return alpha
        if self._missing():
            if self.prec == INF:
                pass
            else:
                alpha = min(alpha, Fraction(self.prec, M) - beta * (self.N - 1))
        if self.tail is None or self.tail.beta < beta:
            return None
        return min(alpha, self.tail.alpha + (self.tail.beta - beta) * self.N)

    # -- arithmetic ---------------------------------------------------------------
    def _coerce(self, other) -> TateSeries:
        if isinstance(other, TateSeries):
            self._check(other)
            return other
        return TateSeries.const(self.ctx, other)

    def __add__(self, other) -> TateSeries:
        other = self._coerce(other)
        N = min(self.N, other.N)
        prec = min(self.prec, other.prec)
        out = {}
        for i in set(self.coeffs) | set(other.coeffs):
            if i < N:
                out[i] = self.coef(i) + other.coef(i)
        tail = None
        if N != INF:
            beta = min(t.beta for t in (self.tail, other.tail) if t is not None) \
                if (self.tail or other.tail) else None
            if beta is not None:
                ea, eb = self._envelope(beta), other._envelope(beta)
                if ea is not None and eb is not None:
                    tail = TailCertificate(_combine_kind(self.tail, other.tail), min(ea, eb), beta)
        return TateSeries(self.ctx, out, prec, N, tail)

    __radd__ = __add__

    def __neg__(self) -> TateSeries:
        return TateSeries(self.ctx, {i: -c for i, c in self.coeffs.items()}, self.prec, self.N, self.tail)

    def __sub__(self, other) -> TateSeries:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> TateSeries:
        return self._coerce(other) - self

    def __mul__(self, other) -> TateSeries:
        if isinstance(other, RamifiedLaurent):
            return self.scale(other)
        if not isinstance(other, TateSeries):
            return self.scale(RamifiedLaurent.const(self.ctx, other))
        return ts_mul(self, other)

    def __rmul__(self, other) -> TateSeries:
        return self * other

    def __pow__(self, k: int) -> TateSeries:
        if k < 0:
            return ts_inv(self) ** (-k)
        result = TateSeries.one(self.ctx)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def scale(self, c: RamifiedLaurent) -> TateSeries:
        """Multiply every coefficient by the constant c."""
        if not isinstance(c, RamifiedLaurent):
            c = RamifiedLaurent.const(self.ctx, c)
        out = {i: a * c for i, a in self.coeffs.items()}
        vc = c.vexp()
        prec = min(self.prec + vc, c.prec + self.known_vexp())
        tail = None
        if self.tail is not None and vc != INF:
            tail = TailCertificate(self.tail.kind, self.tail.alpha + Fraction(vc, self.ctx.M), self.tail.beta)
        return TateSeries(self.ctx, out, prec, self.N, tail)

    def truncate_t(self, N: int) -> TateSeries:
        if N >= self.N or (self.N == INF and self.degree() < N):
            return self
        tail = None
        env_beta = self.tail.beta if self.tail is not None else None
        if self.N == INF:
            # exact polynomial: omitted coefficients are the known ones beyond N
            alpha = self._envelope(Fraction(1))
            if alpha is not None:
                tail = TailCertificate("geometric", alpha, Fraction(1))
        elif env_beta is not None:
            alpha = self._envelope(env_beta)
            if alpha is not None:
                tail = TailCertificate(self.tail.kind, alpha, env_beta)
        return TateSeries(self.ctx, {i: c for i, c in self.coeffs.items() if i < N}, self.prec, N, tail)

    def with_tail(self, tail: TailCertificate | None) -> TateSeries:
        return TateSeries(self.ctx, self.coeffs, self.prec, self.N, tail)

    def twist(self, n: int, widen: bool = False) -> TateSeries:
        return ts_twist(self, n, widen)

    def hyperderiv(self, n: int) -> TateSeries:
        return ts_hyperderiv(self, n)

    def theta_hyperderiv(self, n: int) -> TateSeries:
        return ts_theta_hyperderiv(self, n)

    def eval_theta(self, n: int = 0):
        return ts_eval_theta(self, n)

    def div_binomial(self, a: RamifiedLaurent, m: int, N=None) -> TateSeries:
        return ts_div_binomial(self, a, m, N)

    def is_zero(self) -> bool:
        return all(not c.terms for c in self.coeffs.values())

    def agrees(self, other: TateSeries) -> bool:
        return (self - other).is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, TateSeries):
            return NotImplemented
        return self.ctx.same(other.ctx) and self.agrees(other)

    __hash__ = None

    def __repr__(self) -> str:
        shown = ", ".join(f"t^{i}: {self.coeffs[i]!r}" for i in self.indices()[:3])
        return f"TateSeries(N={self.N}, prec={self.prec}, {{{shown}{', ...' if len(self.coeffs) > 3 else ''}}})"

    def to_json(self) -> dict:
        N = "inf" if self.N == INF else int(self.N)
        return {
            "N_t": N,
            "prec": "inf" if self.prec == INF else int(self.prec),
            "tail": self.tail.to_json() if self.tail else None,
            "coeffs": [[i, self.coeffs[i].to_json()] for i in self.indices()],
        }

    @classmethod
    def from_json(cls, data: dict, ctx: LaurentCtx | None = None) -> TateSeries:
        coeffs = {}
        for i, c in data["coeffs"]:
            rl = RamifiedLaurent.from_json(c, ctx)
            ctx = rl.ctx if ctx is None else ctx
            coeffs[int(i)] = rl
        if ctx is None:
            raise ValueError("empty series needs an explicit context")
        N = INF if data["N_t"] == "inf" else int(data["N_t"])
        prec = INF if data.get("prec", "inf") == "inf" else int(data["prec"])
        return cls(ctx, coeffs, prec, N, TailCertificate.from_json(data.get("tail")))


def ts_add(f: TateSeries, g: TateSeries) -> TateSeries:
    return f + g


def ts_mul(f: TateSeries, g: TateSeries) -> TateSeries:
    f._check(g)
    N = min(f.N, g.N)
    prec = min(f.prec + g.known_vexp(), g.prec + f.known_vexp())
    if len(f.coeffs) * len(g.coeffs) > 64:
        out = _mul_fft(f, g, N, prec)
    else:
        out = {}
        gi = sorted(g.coeffs.items())
        for i, a in f.coeffs.items():
            for j, b in gi:
                k = i + j
                if k >= N:
                    break
                term = a * b
                prev = out.get(k)
                out[k] = term if prev is None else prev + term
    for k in list(out):
        if out[k].prec > prec:
            out[k] = out[k].truncate(prec)
    tail = None
    if N != INF:
        betas = [t.beta for t in (f.tail, g.tail) if t is not None]
        beta = min(betas) if betas else None
        if beta is not None:
            ea, eb = f._envelope(beta), g._envelope(beta)
            if ea is not None and eb is not None:
                tail = TailCertificate(_combine_kind(f.tail, g.tail), ea + eb, beta)
    return TateSeries(f.ctx, out, prec, N, tail)


def _mul_fft(f: TateSeries, g: TateSeries, N, prec) -> dict[int, RamifiedLaurent]:
    """Coefficient products via a two-dimensional FFT over the (t, u) exponent grid.

    Values are residues mod p, so the float convolution is exact after rounding.
    Per-coefficient precision follows the same pairwise rule as the schoolbook loop.
    """
    ctx = f.ctx
    F = ctx.field
    p, n = F.p, F.n
    fi = sorted(f.coeffs.items())
    gi = sorted(g.coeffs.items())
    fv = [(i, c.vexp(), c.prec) for i, c in fi]
    gv = [(j, d.vexp(), d.prec) for j, d in gi]
    kprec: dict[int, float] = {}
    for i, va, pa in fv:
        for j, vb, pb in gv:
            k = i + j
            if k >= N:
                break
            pk = min(pa + vb, pb + va)
            old = kprec.get(k)
            kprec[k] = pk if old is None else min(old, pk)
    if not kprec:
        return {}
    fexp = [m for _, c in fi for m in c.terms]
    gexp = [m for _, c in gi for m in c.terms]
    if not fexp or not gexp:
        return {k: RamifiedLaurent(ctx, {}, min(pk, prec)) for k, pk in kprec.items()}
    fmin, gmin = min(fexp), min(gexp)
    cut = max(min(pk, prec) for pk in kprec.values())
    fmax, gmax = max(fexp), max(gexp)
    if cut != INF:
        fmax = min(fmax, cut - gmin - 1)
        gmax = min(gmax, cut - fmin - 1)
    step = math.gcd(math.gcd(*[m - fmin for m in fexp]), math.gcd(*[m - gmin for m in gexp])) or 1
    rows_f = min(fi[-1][0] + 1, N)
    rows_g = min(gi[-1][0] + 1, N)
    cols_f = max(0, (fmax - fmin) // step + 1)
    cols_g = max(0, (gmax - gmin) // step + 1)
    if cols_f == 0 or cols_g == 0:
        return {k: RamifiedLaurent(ctx, {}, min(pk, prec)) for k, pk in kprec.items()}

    def grid(items, rows, cols, lo, hi):
        arr = np.zeros((n, rows, cols))
        for i, c in items:
            if i >= rows or not c.terms:
                continue
            ms = np.fromiter(c.terms.keys(), dtype=np.int64, count=len(c.terms))
            cs = np.fromiter(c.terms.values(), dtype=np.int64, count=len(c.terms))
            keep = ms <= hi
            cols_i = (ms[keep] - lo) // step
            cs = cs[keep]
            for r in range(n):
                arr[r, i, cols_i] = (cs // p ** r) % p
        return arr

    A = grid(fi, rows_f, cols_f, fmin, fmax)
    B = grid(gi, rows_g, cols_g, gmin, gmax)
    shape = (min(rows_f + rows_g - 1, N if N != INF else rows_f + rows_g - 1), cols_f + cols_g - 1)
    conv = np.zeros((2 * n - 1,) + shape, dtype=np.int64)
    for a in range(n):
        if not A[a].any():
            continue
        for b in range(n):
            if not B[b].any():
                continue
            full = fftconvolve(A[a], B[b])[: shape[0]]
            rounded = np.rint(full)
            if np.abs(full - rounded).max(initial=0.0) > 0.25:
                raise ArithmeticError("FFT convolution lost exactness")
            conv[a + b] += rounded.astype(np.int64) % p
    conv %= p
    mod = F.modulus
    for k in range(2 * n - 2, n - 1, -1):
        layer = conv[k]
        if layer.any():
            for t in range(n):
                if mod[t]:
                    conv[k - n + t] = (conv[k - n + t] - mod[t] * layer) % p
    codes = conv[0]
    for r in range(1, n):
        codes = codes + conv[r] * p ** r
    base = fmin + gmin
    out = {}
    for k, pk in kprec.items():
        pk = min(pk, prec)
        row = codes[k] if k < shape[0] else None
        terms = {}
        if row is not None:
            nz = np.nonzero(row)[0]
            ms = (base + step * nz).tolist()
            vals = row[nz].tolist()
            terms = {m: c for m, c in zip(ms, vals) if m < pk}
        out[k] = RamifiedLaurent(ctx, terms, pk)
    return out


def ts_inv(f: TateSeries, N=None) -> TateSeries:
    """Inverse of a series with invertible constant term, truncated at t^N."""
    a0 = f.coef(0)
    if a0.is_zero():
        raise NotAUnit("constant coefficient is not invertible")
    N = f.N if N is None else min(N, f.N)
    if N == INF:
        raise ValueError("inverting an exact polynomial needs a truncation order")
    inv0 = rl_inv(a0, f.ctx.prec)
    g = [inv0]
    nonzero = sorted((i, c) for i, c in f.coeffs.items() if i > 0)
    for k in range(1, N):
        acc = None
        for i, c in nonzero:
            if i > k:
                break
            term = c * g[k - i]
            acc = term if acc is None else acc + term
        if f._missing():
            gap = RamifiedLaurent(f.ctx, {}, f.prec + min(x.vexp() for x in g))
            acc = gap if acc is None else acc + gap
        g.append(RamifiedLaurent.zero(f.ctx) if acc is None else -(acc * inv0))
    return TateSeries(f.ctx, dict(enumerate(g)), min(x.prec for x in g), N, None)


def ts_div_binomial(f: TateSeries, a: RamifiedLaurent, m: int, N=None) -> TateSeries:
    """f / (1 + a t^m), m >= 1, via the recursion g_k = f_k - a g_{k-m}."""
    N = f.N if N is None else min(N, f.N)
    if N == INF:
        raise ValueError("dividing an exact polynomial needs a truncation order")
    g: dict[int, RamifiedLaurent] = {}
    for k in range(N):
        c = f.coef(k)
        if k >= m and k - m in g:
            c = c - a * g[k - m]
        g[k] = c
    prec = min(c.prec for c in g.values()) if g else f.prec
    tail = None
    va = a.vexp()
    if va != INF:
        beta = Fraction(va, a.ctx.M * m)
        if f.tail is not None:
            beta = min(beta, f.tail.beta)
        alpha = f._envelope(beta)
        if alpha is not None and alpha != INF:
            tail = TailCertificate(f.tail.kind if f.tail else "geometric", alpha, beta)
    return TateSeries(f.ctx, g, prec, N, tail)


def ts_twist(f: TateSeries, n: int, widen: bool = False) -> TateSeries:
    """Coefficientwise Frobenius twist f^(n)."""
    if n == 0:
        return f
    coeffs = {i: c.frobenius(n, widen) for i, c in f.coeffs.items()}
    ctx = next(iter(coeffs.values())).ctx if coeffs else f.ctx
    Q = f.ctx.q ** abs(n)
    if n > 0:
        prec = f.prec * Q
        tail = TailCertificate(f.tail.kind, f.tail.alpha * Q, f.tail.beta * Q) if f.tail else None
    else:
        if ctx.M != f.ctx.M:
            prec = f.prec
        else:
            prec = f.prec if f.prec == INF else -((-f.prec) // Q)
        tail = TailCertificate(f.tail.kind, f.tail.alpha / Q, f.tail.beta / Q) if f.tail else None
    return TateSeries(ctx, coeffs, prec, f.N, tail)


def ts_hyperderiv(f: TateSeries, n: int) -> TateSeries:
    """Hyperderivative in t: sum a_i t^i -> sum binom(i, n) a_i t^(i-n)."""
    if n == 0:
        return f
    p = f.ctx.p
    out = {}
    for i, c in f.coeffs.items():
        if i >= n:
            b = lucas_binom(i, n, p)
            if b:
                out[i - n] = c.scale(b)
    N = f.N - n if f.N != INF else INF
    tail = None
    if f.tail is not None:
        tail = TailCertificate(f.tail.kind, f.tail.alpha + f.tail.beta * n, f.tail.beta)
    # missing coefficients stay zero to the same precision
    return TateSeries(f.ctx, out, f.prec, N, tail)


def ts_theta_hyperderiv(f: TateSeries, n: int) -> TateSeries:
    """Coefficientwise hyperderivative in theta."""
    if n == 0:
        return f
    out = {i: c.theta_hyperderiv(n) for i, c in f.coeffs.items()}
    prec = f.prec + n * f.ctx.M
    tail = None
    if f.tail is not None:
        tail = TailCertificate(f.tail.kind, f.tail.alpha + n, f.tail.beta)
    return TateSeries(f.ctx, out, prec, f.N, tail)


def ts_gauss_norm(f: TateSeries) -> Valuation:
    """Minimal coefficient valuation, consulting the tail bound when present."""
    v = f.known_vexp()
    best = INF if v == INF else Fraction(v, f.ctx.M)
    if f.tail is not None and f.tail.beta >= 0:
        best = min(best, f.tail.bound(f.N))
    return Valuation.of(best)


def ts_eval_theta(f: TateSeries, n: int = 0):
    """(d/dt)^(n) f at t = theta with a certified error valuation (theta-units)."""
    ctx = f.ctx
    M = ctx.M
    if f.N != INF:
        if f.tail is None:
            raise DivergentTail("evaluation needs a tail certificate")
        if f.tail.beta <= 1:
            raise DivergentTail("tail bound does not beat |theta|^i")
    err = INF
    if f.N != INF:
        err = f.tail.alpha + (f.tail.beta - 1) * f.N + n
        if f._missing() and f.prec != INF:
            err = min(err, Fraction(f.prec, M) - (f.N - 1 - n))
    total = RamifiedLaurent.zero(ctx)
    p = ctx.p
    for i in f.indices():
        if i < n:
            continue
        b = lucas_binom(i, n, p)
        c = f.coeffs[i]
        if c.prec != INF:
            err = min(err, Fraction(c.prec, M) - (i - n))
        if b and c.terms:
            total = total + (c * theta_power(ctx, i - n)).scale(b)
    if err == INF:
        return total, Valuation.inf()
    cut = -((-err.numerator * M) // err.denominator)
    return total.truncate(cut), Valuation.of(err)


def ts_from_field(ctx: LaurentCtx, c: FFElem) -> TateSeries:
    return TateSeries.const(ctx, RamifiedLaurent.const(ctx, c))

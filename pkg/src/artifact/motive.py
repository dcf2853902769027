"""Pre-t-motive matrices: twisted polynomial entries, builders for Phi and Psi,
prolongation, derived motives, direct sums and the trivialization verifier."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from typing import Callable

from .errors import ContextMismatch, DimensionMismatch, EnumerationInvalid, NegativeTwistUnrepresentable
from .ffield import FieldCtx, ff_primitive, lucas_binom
from .laurent import INF, LaurentCtx, RamifiedLaurent
from .special import Index, WeightProvider, cmpl_L, omega
from .tate import TateSeries, ts_hyperderiv, ts_twist


# -- twisted polynomials ------------------------------------------------------------

class TwistedExpr:
    """Polynomial in t and vartheta = theta^(q^base) with field coefficients.

    Twisting by m sends vartheta to theta^(q^(base+m)) and coefficients c to
    c^(q^m), so sums, products, twists and t-hyperderivatives all stay in this
    normal form; negative bases stand for inseparable entries like theta^(1/q).
    """

    __slots__ = ("field", "base", "terms")

    def __init__(self, field: FieldCtx, terms: dict[tuple[int, int], int] | None = None, base: int = 0):
        self.field = field
        clean = {k: c for k, c in (terms or {}).items() if c}
        q = field.q
        if not any(d for _, d in clean):
            base = 0
        else:
            while all(d % q == 0 for _, d in clean):
                clean = {(a, d // q): c for (a, d), c in clean.items()}
                base += 1
        self.base = base
        self.terms = clean

    # -- constructors -------------------------------------------------------------
    @classmethod
    def const(cls, field: FieldCtx, c: int = 1) -> TwistedExpr:
        return cls(field, {(0, 0): field.scalar(c)})

    @classmethod
    def zero(cls, field: FieldCtx) -> TwistedExpr:
        return cls(field, {})

    @classmethod
    def t(cls, field: FieldCtx) -> TwistedExpr:
        return cls(field, {(1, 0): 1})

    @classmethod
    def theta(cls, field: FieldCtx, twist: int = 0) -> TwistedExpr:
        return cls(field, {(0, 1): 1}, twist)

    @classmethod
    def t_minus_theta(cls, field: FieldCtx, twist: int = 0) -> TwistedExpr:
        """t - theta^(q^twist)."""
        return cls(field, {(1, 0): 1, (0, 1): field.neg(1)}, twist)

    @classmethod
    def from_poly(cls, field: FieldCtx, poly: dict[tuple[int, int], int]) -> TwistedExpr:
        return cls(field, {k: field.scalar(c) if c < field.p else c for k, c in poly.items()})

    # -- arithmetic ----------------------------------------------------------------
    def _at_base(self, b: int) -> dict:
        if b == self.base or not any(d for _, d in self.terms):
            return dict(self.terms)
        k = self.base - b
        if k < 0:
            raise ValueError("can only lower the base")
        f = self.field.q ** k
        return {(a, d * f): c for (a, d), c in self.terms.items()}

    def _common(self, other: TwistedExpr):
        if self.field != other.field:
            raise ContextMismatch("twisted expressions over different fields")
        bases = [e.base for e in (self, other) if any(d for _, d in e.terms)]
        b = min(bases) if bases else 0
        return b, self._at_base(b), other._at_base(b)

    def __add__(self, other) -> TwistedExpr:
        other = self._coerce(other)
        b, x, y = self._common(other)
        F = self.field
        for k, c in y.items():
            x[k] = F.add(x.get(k, 0), c)
        return TwistedExpr(F, x, b)

    __radd__ = __add__

    def __neg__(self) -> TwistedExpr:
        F = self.field
        return TwistedExpr(F, {k: F.neg(c) for k, c in self.terms.items()}, self.base)

    def __sub__(self, other) -> TwistedExpr:
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> TwistedExpr:
        return self._coerce(other) - self

    def __mul__(self, other) -> TwistedExpr:
        other = self._coerce(other)
        b, x, y = self._common(other)
        F = self.field
        out: dict = {}
        for (a1, d1), c1 in x.items():
            for (a2, d2), c2 in y.items():
                k = (a1 + a2, d1 + d2)
                out[k] = F.add(out.get(k, 0), F.mul(c1, c2))
        return TwistedExpr(F, out, b)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> TwistedExpr:
        out = TwistedExpr.const(self.field, 1)
        for _ in range(k):
            out = out * self
        return out

    def _coerce(self, other) -> TwistedExpr:
        if isinstance(other, TwistedExpr):
            return other
        return TwistedExpr.const(self.field, int(other))

    def twist(self, m: int) -> TwistedExpr:
        F = self.field
        return TwistedExpr(F, {k: F.frob(c, m) for k, c in self.terms.items()}, self.base + m)

    def hyperderiv(self, n: int) -> TwistedExpr:
        """n-th hyperderivative in t."""
        if n == 0:
            return self
        F = self.field
        out = {}
        for (a, d), c in self.terms.items():
            if a >= n:
                bcoef = lucas_binom(a, n, F.p)
                if bcoef:
                    out[(a - n, d)] = F.mul(c, F.scalar(bcoef))
        return TwistedExpr(F, out, self.base)

    def is_zero(self) -> bool:
        return not self.terms

    def min_twist(self) -> int:
        return self.base if any(d for _, d in self.terms) else 0

    def at_t_theta(self) -> TwistedExpr:
        """Substitute t = theta; the result involves theta only."""
        F = self.field
        b = min(self.min_twist(), 0)
        x = self._at_base(b) if any(d for _, d in self.terms) else dict(self.terms)
        f = F.q ** (-b)
        out: dict = {}
        for (a, d), c in x.items():
            k = (0, d + a * f)
            out[k] = F.add(out.get(k, 0), c)
        return TwistedExpr(F, out, b)

    def __eq__(self, other) -> bool:
        if isinstance(other, int):
            other = TwistedExpr.const(self.field, other)
        if not isinstance(other, TwistedExpr):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    # -- evaluation ---------------------------------------------------------------------
    def to_series(self, ctx: LaurentCtx) -> TateSeries:
        """Numeric polynomial in t over the Laurent model."""
        F = ctx.field
        if F != self.field and any(c >= self.field.p for c in self.terms.values()):
            raise ContextMismatch("coefficients do not embed in the evaluation field")
        q, M = ctx.q, ctx.M
        b = self.base
        by_t: dict[int, RamifiedLaurent] = {}
        for (a, d), c in self.terms.items():
            if b >= 0:
                e_num, e_den = d * q ** b, 1
            else:
                e_num, e_den = d, q ** (-b)
            if (e_num * M) % e_den:
                raise NegativeTwistUnrepresentable(
                    f"theta^({e_num}/{e_den}) needs M divisible by {e_den}")
            # theta^x = (-1)^x u^(-x M); the sign is (-1)^d because Frobenius fixes -1
            sign = 1 if d % 2 == 0 else F.neg(1)
            mono = RamifiedLaurent(ctx, {-(e_num * M) // e_den: F.mul(sign, c)})
            by_t[a] = by_t[a] + mono if a in by_t else mono
        return TateSeries(ctx, by_t)

    # -- text form ----------------------------------------------------------------------
    def _poly_text(self, terms: dict) -> str:
        if not terms:
            return "poly(0)"
        parts = []
        for (a, d), c in sorted(terms.items()):
            parts.append(f"{c}*t^{a}*theta^{d}")
        return "poly(" + " + ".join(parts) + ")"

    def to_prefix(self) -> str:
        if self.base == 0:
            return self._poly_text(self.terms)
        F = self.field
        pre = {k: F.frob(c, -self.base) for k, c in self.terms.items()}
        return f"tw({self.base}, {self._poly_text(pre)})"

    def __repr__(self) -> str:
        return self.to_prefix()


_TOKEN = re.compile(r"\s*(tw|dt|mul|add|poly)\s*\(")


def parse_prefix(text: str, field: FieldCtx) -> TwistedExpr:
    """Parse the prefix grammar poly(...), tw(m, e), dt(n, e), mul(e, e), add(e, e)."""
    expr, rest = _parse(text.strip(), field)
    if rest.strip():
        raise ValueError(f"trailing text: {rest!r}")
    return expr


def _split_args(body: str):
    depth, start, out = 0, 0, []
    for i, ch in enumerate(body):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "," and depth == 0:
            out.append(body[start:i])
            start = i + 1
    out.append(body[start:])
    return [x.strip() for x in out]


def _parse(text: str, field: FieldCtx):
    m = _TOKEN.match(text)
    if not m:
        raise ValueError(f"cannot parse {text[:30]!r}")
    name = m.group(1)
    depth, i = 1, m.end()
    while depth:
        if i >= len(text):
            raise ValueError("unbalanced parentheses")
        depth += {"(": 1, ")": -1}.get(text[i], 0)
        i += 1
    body, rest = text[m.end():i - 1], text[i:]
    if name == "poly":
        return _parse_poly(body, field), rest
    args = _split_args(body)
    if name in ("tw", "dt"):
        k = int(args[0])
        inner = parse_prefix(args[1], field)
        return (inner.twist(k) if name == "tw" else inner.hyperderiv(k)), rest
    x, y = parse_prefix(args[0], field), parse_prefix(args[1], field)
    return (x * y if name == "mul" else x + y), rest


def _parse_poly(body: str, field: FieldCtx) -> TwistedExpr:
    terms: dict = {}
    body = body.strip()
    if body in ("", "0"):
        return TwistedExpr.zero(field)
    for term in body.split("+"):
        c, a, d = 1, 0, 0
        for factor in term.split("*"):
            factor = factor.strip()
            if factor.startswith("t^"):
                a = int(factor[2:])
            elif factor == "t":
                a = 1
            elif factor.startswith("theta^"):
                d = int(factor[6:])
            elif factor == "theta":
                d = 1
            else:
                c = int(factor)
        k = (a, d)
        terms[k] = field.add(terms.get(k, 0), c % field.size)
    return TwistedExpr(field, terms)


# -- twisted matrices --------------------------------------------------------------

class TwistedMatrix:
    """Matrix of TwistedExpr entries."""

    def __init__(self, rows: list[list[TwistedExpr]]):
        self.rows = rows
        self.n = len(rows)
        self.m = len(rows[0]) if rows else 0
        if any(len(r) != self.m for r in rows):
            raise DimensionMismatch("ragged matrix")

    @property
    def field(self) -> FieldCtx:
        return self.rows[0][0].field

    @classmethod
    def identity(cls, field: FieldCtx, n: int) -> TwistedMatrix:
        return cls([[TwistedExpr.const(field, int(i == j)) for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, field: FieldCtx, n: int, m: int | None = None) -> TwistedMatrix:
        return cls([[TwistedExpr.zero(field) for _ in range(m or n)] for _ in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __matmul__(self, other: TwistedMatrix) -> TwistedMatrix:
        if self.m != other.n:
            raise DimensionMismatch(f"{self.n}x{self.m} times {other.n}x{other.m}")
        F = self.field
        out = []
        for i in range(self.n):
            row = []
            for j in range(other.m):
                acc = TwistedExpr.zero(F)
                for k in range(self.m):
                    if self.rows[i][k].terms and other.rows[k][j].terms:
                        acc = acc + self.rows[i][k] * other.rows[k][j]
                row.append(acc)
            out.append(row)
        return TwistedMatrix(out)

    def __add__(self, other: TwistedMatrix) -> TwistedMatrix:
        if (self.n, self.m) != (other.n, other.m):
            raise DimensionMismatch("shape mismatch")
        return TwistedMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def map(self, fn) -> TwistedMatrix:
        return TwistedMatrix([[fn(x) for x in r] for r in self.rows])

    def twist(self, k: int) -> TwistedMatrix:
        return self.map(lambda x: x.twist(k))

    def hyperderiv(self, k: int) -> TwistedMatrix:
        return self.map(lambda x: x.hyperderiv(k))

    def __eq__(self, other) -> bool:
        if not isinstance(other, TwistedMatrix):
            return NotImplemented
        return (self.n, self.m) == (other.n, other.m) and all(
            a == b for r, s in zip(self.rows, other.rows) for a, b in zip(r, s))

    __hash__ = None

    def to_series(self, ctx: LaurentCtx) -> list[list[TateSeries]]:
        return [[x.to_series(ctx) for x in r] for r in self.rows]

    def to_prefix(self) -> list[list[str]]:
        return [[x.to_prefix() for x in r] for r in self.rows]

    @classmethod
    def from_prefix(cls, rows: list[list[str]], field: FieldCtx) -> TwistedMatrix:
        return cls([[parse_prefix(x, field) for x in r] for r in rows])

    def det_at_theta(self) -> TwistedExpr:
        """Determinant after substituting t = theta (Laplace expansion with memo)."""
        if self.n != self.m:
            raise DimensionMismatch("determinant needs a square matrix")
        ent = [[x.at_t_theta() for x in r] for r in self.rows]
        F = self.field
        n = self.n
        if all(not ent[i][j].terms for i in range(n) for j in range(i + 1, n)) or \
                all(not ent[i][j].terms for i in range(n) for j in range(i)):
            return reduce(lambda a, b: a * b, (ent[i][i] for i in range(n)), TwistedExpr.const(F, 1))
        memo: dict = {}

        def minor(row: int, cols: frozenset) -> TwistedExpr:
            if row == n:
                return TwistedExpr.const(F, 1)
            key = (row, cols)
            if key in memo:
                return memo[key]
            acc = TwistedExpr.zero(F)
            sign_idx = 0
            for j in range(n):
                if j in cols:
                    continue
                if ent[row][j].terms:
                    term = ent[row][j] * minor(row + 1, cols | {j})
                    acc = acc - term if sign_idx % 2 else acc + term
                sign_idx += 1
            memo[key] = acc
            return acc

        return minor(0, frozenset())


def _block_diag_twisted(mats: list[TwistedMatrix]) -> TwistedMatrix:
    F = mats[0].field
    n = sum(m.n for m in mats)
    out = TwistedMatrix.zeros(F, n).rows
    off = 0
    for m in mats:
        for i in range(m.n):
            for j in range(m.m):
                out[off + i][off + j] = m.rows[i][j]
        off += m.n
    return TwistedMatrix(out)


def rho(X: TwistedMatrix, n: int) -> TwistedMatrix:
    """Block lower-triangular Toeplitz matrix with blocks d_t^(k) X."""
    F = X.field
    d = X.n
    ders = [X.hyperderiv(k) for k in range(n + 1)]
    rows = TwistedMatrix.zeros(F, d * (n + 1), X.m * (n + 1)).rows
    for bi in range(n + 1):
        for bj in range(bi + 1):
            D = ders[bi - bj]
            for i in range(d):
                for j in range(X.m):
                    rows[bi * d + i][bj * X.m + j] = D.rows[i][j]
    return TwistedMatrix(rows)


def rho_series(X: list[list[TateSeries]], n: int, ctx: LaurentCtx) -> list[list[TateSeries]]:
    d, m = len(X), len(X[0])
    ders = [[[ts_hyperderiv(x, k) for x in r] for r in X] for k in range(n + 1)]
    zero = TateSeries.zero(ctx)
    rows = [[zero] * (m * (n + 1)) for _ in range(d * (n + 1))]
    for bi in range(n + 1):
        for bj in range(bi + 1):
            D = ders[bi - bj]
            for i in range(d):
                for j in range(m):
                    rows[bi * d + i][bj * m + j] = D[i][j]
    return rows


def _block_diag_series(mats: list, ctx: LaurentCtx) -> list[list[TateSeries]]:
    n = sum(len(m) for m in mats)
    zero = TateSeries.zero(ctx)
    out = [[zero] * n for _ in range(n)]
    off = 0
    for m in mats:
        for i in range(len(m)):
            for j in range(len(m)):
                out[off + i][off + j] = m[i][j]
        off += len(m)
    return out


# -- motive specs ----------------------------------------------------------------

PsiBuilder = Callable[[LaurentCtx], list]


@dataclass
class MotiveSpec:
    name: str
    level: int
    Phi: TwistedMatrix
    Psi: PsiBuilder | None = None
    notes: list[str] = field(default_factory=list)
    blocks: list = field(default_factory=list)

    @property
    def dim(self) -> int:
        return self.Phi.n

    def psi(self, ctx: LaurentCtx) -> list[list[TateSeries]]:
        if self.Psi is None:
            raise ValueError(f"{self.name} has no trivialization builder")
        return self.Psi(ctx)

    def to_json(self) -> dict:
        return {"name": self.name, "level": self.level, "Phi": self.Phi.to_prefix(),
                "has_Psi": self.Psi is not None, "notes": self.notes}


def mk_carlitz(field: FieldCtx) -> MotiveSpec:
    Phi = TwistedMatrix([[TwistedExpr.t_minus_theta(field)]])
    return MotiveSpec("C", 1, Phi, lambda ctx: [[omega(ctx, 1, 0)]], ["trivialized by Omega"])


def _companion(field: FieldCtx, l: int) -> TwistedMatrix:
    rows = TwistedMatrix.zeros(field, l).rows
    for i in range(l - 1):
        rows[i][i + 1] = TwistedExpr.const(field, 1)
    rows[l - 1][0] = TwistedExpr.t_minus_theta(field)
    return TwistedMatrix(rows)


def mk_phi_psi_l(field: FieldCtx, l: int) -> MotiveSpec:
    """Companion matrix with trivialization entries (xi^k Omega_l)^(-i)."""
    Phi = _companion(field, l)

    def build(ctx: LaurentCtx):
        F = ctx.field
        xi = ff_primitive(F, l).code
        rows = []
        for i in range(l):
            om = omega(ctx, l, i)
            row = []
            for k in range(l):
                c = F.frob(F.pow(xi, k), -i)
                row.append(om.scale(RamifiedLaurent(ctx, {0: c})))
            rows.append(row)
        return rows

    return MotiveSpec(f"Phi_{l}", 1, Phi, build, [f"needs F_(q^{l}) coefficients and q^{l}-1 | M"])


def mk_N(field: FieldCtx, l: int) -> MotiveSpec:
    Phi = _block_diag_twisted([TwistedMatrix([[TwistedExpr.t_minus_theta(field)]]), _companion(field, l)])
    return MotiveSpec(f"N_{l}", 1, Phi, None, ["no level-1 trivialization is built"])


def mk_N_derived(field: FieldCtx, l: int) -> MotiveSpec:
    first = TwistedExpr.const(field, 1)
    for j in range(l):
        first = first * TwistedExpr.t_minus_theta(field, -j)
    diag = [first] + [TwistedExpr.t_minus_theta(field, -j) for j in range(l)]
    n = l + 1
    rows = TwistedMatrix.zeros(field, n).rows
    for i, e in enumerate(diag):
        rows[i][i] = e

    def build(ctx: LaurentCtx):
        entries = [omega(ctx, 1, 0)] + [omega(ctx, l, j) for j in range(l)]
        zero = TateSeries.zero(ctx)
        return [[entries[i] if i == j else zero for j in range(n)] for i in range(n)]

    return MotiveSpec(f"N_{l}^({l})", l, TwistedMatrix(rows), build, [])


def mk_derived(spec: MotiveSpec, s: int) -> MotiveSpec:
    """Phi' = Phi^(-sr+r) ... Phi^(-r) Phi at level r*s, same Psi."""
    r = spec.level
    out = spec.Phi
    for k in range(1, s):
        out = spec.Phi.twist(-k * r) @ out
    return MotiveSpec(f"{spec.name}^({s})", r * s, out, spec.Psi, spec.notes + [f"derived s={s}"])


def mk_prolong(spec: MotiveSpec, n: int) -> MotiveSpec:
    Psi = None
    if spec.Psi is not None:
        base = spec.Psi

        def Psi(ctx: LaurentCtx, base=base):
            return rho_series(base(ctx), n, ctx)

    return MotiveSpec(f"rho_{n}({spec.name})", spec.level, rho(spec.Phi, n), Psi, spec.notes)


def _omega_power(ctx: LaurentCtx, cache: dict, k: int) -> TateSeries:
    if k not in cache:
        if 1 not in cache:
            cache[1] = omega(ctx, 1, 0)
        cache[k] = TateSeries.one(ctx) if k == 0 else cache[1] ** k
    return cache[k]


def mk_M_index(field: FieldCtx, s: Index, m: int, weights: WeightProvider) -> MotiveSpec:
    """The motive of the index s, prolonged m times."""
    d = s.dep
    tm = TwistedExpr.t_minus_theta(field)
    tails = [sum(s.parts[j:]) for j in range(d)]
    rows = TwistedMatrix.zeros(field, d + 1).rows
    for j in range(d):
        weights.validate(s[j])
        u = TwistedExpr.from_poly(field, weights.poly(s[j]))
        rows[j][j] = tm ** tails[j]
        rows[j + 1][j] = (tm ** tails[j]) * u.twist(-1)
    rows[d][d] = TwistedExpr.const(field, 1)
    Phi = TwistedMatrix(rows)

    def build(ctx: LaurentCtx):
        cache: dict = {}
        zero = TateSeries.zero(ctx)
        out = [[zero] * (d + 1) for _ in range(d + 1)]
        for a in range(d + 1):
            for b in range(a + 1):
                if a == b:
                    out[a][a] = _omega_power(ctx, cache, tails[a]) if a < d else TateSeries.one(ctx)
                    continue
                L = cmpl_L(ctx, s, a + 1, b + 1, weights, omega_series=_omega_power(ctx, cache, 1))
                out[a][b] = _omega_power(ctx, cache, tails[a]) * L if a < d else L
        return out

    spec = MotiveSpec(f"M[{s}]", 1, Phi, build, [])
    if m:
        spec = mk_prolong(spec, m)
        spec.name = f"M[({s}),{m}]"
    return spec


def mk_direct_sum(specs: list[MotiveSpec], name: str | None = None) -> MotiveSpec:
    """Block-diagonal sum, deriving every summand to the lcm of the levels first."""
    level = reduce(math.lcm, (sp.level for sp in specs), 1)
    parts = [sp if sp.level == level else mk_derived(sp, level // sp.level) for sp in specs]
    Phi = _block_diag_twisted([sp.Phi for sp in parts])
    Psi = None
    if all(sp.Psi is not None for sp in parts):
        builders = [sp.Psi for sp in parts]

        def Psi(ctx: LaurentCtx):
            return _block_diag_series([b(ctx) for b in builders], ctx)

    return MotiveSpec(name or " + ".join(sp.name for sp in parts), level, Phi, Psi, [], parts)


def mk_M_i(field: FieldCtx, I, n: int, i: int, weights: WeightProvider) -> MotiveSpec:
    """rho_n C plus the motives of the first i entries of the sub-index-first enumeration of I x {0..n}."""
    from .relations import enumerate_en, validate_en
    order = enumerate_en(I, n)
    if not validate_en(order):
        raise EnumerationInvalid("enumeration lists an index before one of its sub-indices")
    specs = [mk_prolong(mk_carlitz(field), n)]
    for s, m in order[:i]:
        specs.append(mk_M_index(field, s, m, weights))
    return mk_direct_sum(specs, f"M_{i}")


# -- verification -------------------------------------------------------------------

@dataclass
class Report:
    name: str
    status: str
    defect_exponent: float
    defect_valuation: Fraction | float
    det_phi_at_theta_nonzero: bool | None = None
    entire_tails: bool | None = None
    notes: list[str] = field(default_factory=list)
    runtime_ms: float = 0.0

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    def to_json(self) -> dict:
        dv = self.defect_valuation
        return {"name": self.name, "status": self.status,
                "defect_exponent": "inf" if self.defect_exponent == INF else int(self.defect_exponent),
                "defect_valuation": "inf" if dv == INF else str(dv),
                "det_phi_at_theta_nonzero": self.det_phi_at_theta_nonzero,
                "entire_tails": self.entire_tails,
                "runtime_ms": round(self.runtime_ms, 1), "notes": self.notes}


THRESHOLD = 150


def relative_defect(lhs: TateSeries, diff: TateSeries, ref=None):
    """u-exponent gap between a difference and the size of the reference value."""
    dv = diff.known_vexp()
    ref = lhs.known_vexp() if ref is None else ref
    if dv == INF:
        return INF
    if ref == INF:
        return dv
    return dv - ref


def series_matmul(A, B, ctx: LaurentCtx):
    n, k, m = len(A), len(B), len(B[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = None
            for t in range(k):
                a, b = A[i][t], B[t][j]
                if a.is_zero() and a.exact or b.is_zero() and b.exact:
                    continue
                term = a * b
                acc = term if acc is None else acc + term
            row.append(acc if acc is not None else TateSeries.zero(ctx))
        out.append(row)
    return out


def verify_rat(Phi: TwistedMatrix, Psi: list[list[TateSeries]], r: int, ctx: LaurentCtx,
               name: str = "trivialization", threshold=THRESHOLD) -> Report:
    """Check Psi = Phi^(r) Psi^(r) entrywise and report the smallest relative defect."""
    import time
    t0 = time.perf_counter()
    n = Phi.n
    if Phi.m != n or len(Psi) != n or any(len(row) != n for row in Psi):
        raise DimensionMismatch("Phi and Psi must be square of the same size")
    PhiR = Phi.twist(r).to_series(ctx)
    PsiR = [[ts_twist(x, r) if not (x.is_zero() and x.exact) else x for x in row] for row in Psi]
    prod = series_matmul(PhiR, PsiR, ctx)
    refs = [x.known_vexp() for row in Psi for x in row if not x.is_zero()]
    ref_min = min(refs) if refs else 0
    worst = INF
    for i in range(n):
        for j in range(n):
            lhs = Psi[i][j]
            diff = lhs - prod[i][j]
            ref = lhs.known_vexp() if not lhs.is_zero() else ref_min
            worst = min(worst, relative_defect(lhs, diff, ref))
    det = Phi.det_at_theta()
    tails_ok = all((x.N == INF) or (x.tail is not None and x.tail.beta > 1) for row in Psi for x in row)
    val = INF if worst == INF else Fraction(worst, ctx.M)
    status = "PASS" if val > threshold else "FAIL"
    notes = []
    if det.is_zero():
        notes.append("det Phi vanishes at t=theta: entireness criterion not applicable")
    return Report(name, status, worst, val, not det.is_zero(), tails_ok, notes,
                  (time.perf_counter() - t0) * 1000)


def verify_spec(spec: MotiveSpec, ctx: LaurentCtx, threshold=THRESHOLD, perturb=None) -> Report:
    Psi = spec.psi(ctx)
    if perturb is not None:
        i, j = perturb
        bump = TateSeries.const(ctx, RamifiedLaurent(ctx, {0: 1, 5: 1}))
        Psi = [list(row) for row in Psi]
        Psi[i][j] = Psi[i][j] * bump
    return verify_rat(spec.Phi, Psi, spec.level, ctx, spec.name, threshold)


def toeplitz_shape_check(mat, n: int, block_size: int) -> bool:
    """True iff mat is block lower-triangular Toeplitz with (n+1) blocks of the given size."""
    size = len(mat)
    if size != block_size * (n + 1) or any(len(r) != size for r in mat):
        raise DimensionMismatch("matrix size must be block_size * (n + 1)")

    def is_zero(x) -> bool:
        return x.is_zero() if hasattr(x, "is_zero") else x == 0

    def same(x, y) -> bool:
        if isinstance(x, TateSeries):
            return (x - y).is_zero()
        return x == y

    for bi in range(n + 1):
        for bj in range(n + 1):
            for i in range(block_size):
                for j in range(block_size):
                    x = mat[bi * block_size + i][bj * block_size + j]
                    if bj > bi:
                        if not is_zero(x):
                            return False
                    elif not same(x, mat[(bi - bj) * block_size + i][j]):
                        return False
    return True

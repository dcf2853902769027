"""Index combinatorics, predicted transcendence-degree counts, the identity suite
and bounded-height relation searches over truncated values."""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

from sympy import GF
from sympy.polys.matrices import DomainMatrix

from .errors import BudgetExceeded, InsufficientPrecision, NotSubClosed
from .ffield import FieldCtx, ff_make
from .laurent import INF, LaurentCtx, RamifiedLaurent, rl_const_theta_power, rl_inv, theta_power
from .special import (Index, at_series, at_weights, carlitz_factorial, carlitz_pi, ctx_for,
                      digits_of_fraction, eval_ctx, gamma_arith, gfun, mzv, omega, PadicDigits, bbD)
from .tate import TateSeries, ts_eval_theta, ts_hyperderiv, ts_inv, ts_theta_hyperderiv

EVIDENCE_BANNER = "bounded-height evidence only: an empty basis does not certify independence"
THRESHOLD = 150


# -- index sets -----------------------------------------------------------------------

class IndexSet:
    """Finite set of indices kept in canonical (depth, lexicographic) order."""

    def __init__(self, items=()):
        self.items = tuple(sorted({x if isinstance(x, Index) else Index.of(*x) for x in items},
                                  key=lambda s: (s.dep, s.parts)))

    @classmethod
    def parse(cls, text: str) -> IndexSet:
        """'1;2;1,2' -> {(1), (2), (1,2)}."""
        return cls(Index.parse(t) for t in text.split(";") if t.strip())

    def __iter__(self):
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __contains__(self, s) -> bool:
        return s in self.items

    def __eq__(self, other) -> bool:
        return isinstance(other, IndexSet) and self.items == other.items

    def __hash__(self) -> int:
        return hash(self.items)

    def __repr__(self) -> str:
        return "{" + "; ".join(f"({s})" for s in self.items) + "}"


def sub(s: Index) -> IndexSet:
    """Contiguous sub-indices (s_i, ..., s_j)."""
    d = s.dep
    return IndexSet(Index(s.parts[i:j + 1]) for i in range(d) for j in range(i, d))


def sub_closure(I) -> IndexSet:
    out = set()
    for s in I:
        out.update(sub(s))
    return IndexSet(out)


def is_sub_closed(I) -> bool:
    return sub_closure(I) == IndexSet(I)


def subsequences(s: Index) -> IndexSet:
    """All nonempty subsequences (s_j1, ..., s_jd') with j1 < ... < jd'."""
    d = s.dep
    return IndexSet(Index(tuple(s.parts[k] for k in c))
                    for r in range(1, d + 1) for c in itertools.combinations(range(d), r))


def enumerate_en(I, n: int) -> list[tuple[Index, int]]:
    """Order I x {0..n} by (m, depth, parts)."""
    I = IndexSet(I)
    if not is_sub_closed(I):
        raise NotSubClosed("index set is not closed under contiguous sub-indices")
    pairs = [(s, m) for s in I for m in range(n + 1)]
    return sorted(pairs, key=lambda sm: (sm[1], sm[0].dep, sm[0].parts))


def validate_en(order: list[tuple[Index, int]]) -> bool:
    """Every (s', m') with s' in Sub(s) and m' <= m appears no later than (s, m)."""
    pos = {(s, m): i for i, (s, m) in enumerate(order)}
    for i, (s, m) in enumerate(order):
        for s2 in sub(s):
            for m2 in range(m + 1):
                j = pos.get((s2, m2))
                if j is None or j > i:
                    return False
    return True


# -- predicted counts ----------------------------------------------------------------

def trdeg_cpty(s: int, l: int, q: int, p: int) -> int:
    """Gamma and zeta values up to s: s - [s/p] - [s/(q-1)] + [s/(p(q-1))] + l."""
    return s - s // p - s // (q - 1) + s // (p * (q - 1)) + l


def trdeg_gamma_hyper(l: int, n: int) -> int:
    return l * (n + 1)


def trdeg_omega_hyper(n: int) -> int:
    return n + 1


def trdeg_sub_indep(r: int, n: int) -> int:
    return (n + 1) * 2 ** r


def trdeg_main_total(r: int, n: int, l: int) -> int:
    return trdeg_gamma_hyper(l, n) + trdeg_sub_indep(r, n) - trdeg_omega_hyper(n)


def independent_family_size(r: int, n: int, l: int) -> int:
    """Number of hyperderivative gamma values plus hyperderivative AT values over subsequences."""
    return (n + 1) * l + (n + 1) * (2 ** r - 1)


# -- reports --------------------------------------------------------------------------

@dataclass
class CheckReport:
    name: str
    status: str
    defect_valuation: Fraction | float
    runtime_ms: float = 0.0
    notes: list[str] = field(default_factory=list)
    defect_exponent: float | None = None
    data: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.status == "PASS"

    def to_json(self) -> dict:
        dv = self.defect_valuation
        out = {"name": self.name, "status": self.status,
               "defect_valuation": "inf" if dv == INF else str(dv),
               "runtime_ms": round(self.runtime_ms, 1), "notes": self.notes}
        if self.defect_exponent is not None:
            out["defect_exponent"] = "inf" if self.defect_exponent == INF else int(self.defect_exponent)
        if self.data:
            out["data"] = self.data
        return out


@dataclass
class SuiteReport:
    reports: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.reports)

    def to_json(self) -> list:
        return [r.to_json() for r in self.reports]


def _report_from_motive(r) -> CheckReport:
    return CheckReport(r.name, r.status, r.defect_valuation, r.runtime_ms, list(r.notes), r.defect_exponent,
                       {"det_phi_at_theta_nonzero": r.det_phi_at_theta_nonzero, "entire_tails": r.entire_tails})


def rel_defect(lhs: RamifiedLaurent, rhs: RamifiedLaurent) -> float:
    """u-exponent of lhs - rhs relative to the size of lhs."""
    diff = lhs - rhs
    dv = diff.vexp()
    if dv == INF:
        return INF
    ref = lhs.vexp() if lhs.terms else rhs.vexp() if rhs.terms else 0
    return dv - ref


def _series_defect(lhs: TateSeries, rhs: TateSeries) -> float:
    dv = (lhs - rhs).known_vexp()
    if dv == INF:
        return INF
    # a side that vanishes to the working precision carries no scale: measure absolutely
    ref = lhs if not lhs.is_zero() else rhs
    return dv - (ref.known_vexp() if not ref.is_zero() else 0)


def _finish(name, exp, M, t0, threshold=THRESHOLD, notes=None, data=None) -> CheckReport:
    val = INF if exp == INF else Fraction(exp, M)
    status = "PASS" if val > threshold else "FAIL"
    return CheckReport(name, status, val, (time.perf_counter() - t0) * 1000, notes or [], exp, data or {})


def _bump(ctx: LaurentCtx) -> RamifiedLaurent:
    """The fault factor 1 + u^5."""
    return RamifiedLaurent(ctx, {0: 1, 5: 1})


# -- gamma identities ------------------------------------------------------------------

def prop_gam_omega_ctx(q: int, l: int, target=200) -> LaurentCtx:
    p = _prime_of(q)
    F = ff_make(p, round(math.log(q, p)))
    return ctx_for(F, q ** l - 1, target)


def _prime_of(q: int) -> int:
    for p in range(2, q + 1):
        if q % p == 0:
            return p
    raise ValueError(q)


def check_prop_gam_omega(ctx: LaurentCtx, l: int, j: int, fault: str | None = None,
                         threshold=THRESHOLD) -> CheckReport:
    """G(q^j/(1-q^l)) = (-theta)^(q^j'/(q^l-1)) Omega_l^(-l+j') G(q^(j'-1)/(1-q^l))^q, j' = j or l if j = 0.

    fault: 'const' shifts the constant exponent numerator by one, 'u5' multiplies it by 1 + u^5,
    'sign' flips the sign of the Omega_l factor.
    """
    t0 = time.perf_counter()
    q = ctx.q
    jj = j if j >= 1 else l
    lhs = gfun(ctx, digits_of_fraction(q ** j, l, q))
    prev = gfun(ctx, digits_of_fraction(q ** (jj - 1), l, q))
    const = rl_const_theta_power(q ** jj + (1 if fault == "const" else 0), q ** l - 1, ctx)
    if fault == "u5":
        const = const * _bump(ctx)
    om = omega(ctx, l, l - jj)
    if fault == "sign":
        om = -om
    rhs = (prev ** q) * om
    rhs = rhs.scale(const)
    exp = _series_defect(lhs, rhs)
    name = f"prop_gamma_omega(l={l},j={j})"
    return _finish(name, exp, ctx.M, t0, threshold)


def check_omega_product(ctx: LaurentCtx, l: int, fault: str | None = None, threshold=THRESHOLD) -> CheckReport:
    """Omega = Omega_l Omega_l^(-1) ... Omega_l^(-l+1) with unit constant 1."""
    t0 = time.perf_counter()
    lhs = omega(ctx, 1, 0)
    rhs = None
    for j in range(l):
        f = omega(ctx, l, j)
        rhs = f if rhs is None else rhs * f
    if fault == "sign":
        rhs = -rhs
    elif fault == "u5":
        rhs = rhs.scale(_bump(ctx))
    return _finish(f"omega_product(l={l})", _series_defect(lhs, rhs), ctx.M, t0, threshold)


def lemma_bj_product(ctx: LaurentCtx, l: int, h: int, j: int) -> TateSeries:
    """P_N = prod_{i=0}^{N} D_(il+h) with N minimal such that q^(Nl) > j."""
    q = ctx.q
    N = 0
    while q ** (N * l) <= j:
        N += 1
    out = TateSeries.one(ctx)
    for i in range(N + 1):
        out = out * bbD(ctx, i * l + h)
    return out


def check_lemma_bj(ctx: LaurentCtx, l: int, h: int, j_max: int, threshold=THRESHOLD,
                   fault: str | None = None) -> CheckReport:
    """d_theta^(j) G = b_j G with b_j = d_theta^(j) P_N / P_N for j <= j_max."""
    t0 = time.perf_counter()
    q = ctx.q
    G = gfun(ctx, digits_of_fraction(q ** h, l, q))
    worst = INF
    notes = []
    regular = True
    for j in range(j_max + 1):
        P = lemma_bj_product(ctx, l, h, j)
        bj = ts_theta_hyperderiv(P, j) * ts_inv(P, G.N)
        if j == 0:
            bj = TateSeries.one(ctx)
        if fault == "u5":
            bj = bj.scale(_bump(ctx))
        lhs = ts_theta_hyperderiv(G, j)
        rhs = bj * G
        worst = min(worst, _series_defect(lhs, rhs))
        # regular at t = theta: P_N(theta) is a nonzero unit-type value
        pv, _ = ts_eval_theta(P)
        if not pv.terms:
            regular = False
    if not regular:
        notes.append("P_N vanishes at t=theta")
    rep = _finish(f"lemma_bj(l={l},h={h},j<={j_max})", worst, ctx.M, t0, threshold, notes,
                  {"b_j_regular_at_theta": regular})
    if not regular:
        rep.status = "FAIL"
    return rep


# -- relation search -------------------------------------------------------------------

@dataclass
class Relation:
    coeffs: dict[str, list[int]]
    residual_valuation: Fraction

    def to_json(self) -> dict:
        return {"coeffs": self.coeffs, "residual_valuation": str(self.residual_valuation)}


@dataclass
class RelationBasis:
    labels: list[str]
    D: int
    relations: list[Relation] = field(default_factory=list)
    precision: Fraction | None = None
    banner: str = EVIDENCE_BANNER

    @property
    def empty(self) -> bool:
        return not self.relations

    def to_json(self) -> dict:
        return {"banner": self.banner, "labels": self.labels, "D": self.D,
                "precision": None if self.precision is None else str(self.precision),
                "relations": [r.to_json() for r in self.relations]}


def _fq_basis(F: FieldCtx) -> list[int]:
    """F_p-basis of F_q inside the context field, as codes."""
    basis, rows = [], []
    for c in range(1, F.size):
        if not F.in_subfield(c, 1):
            continue
        cand = rows + [list(F.coords(c))]
        if DomainMatrix([[GF(F.p)(x) for x in r] for r in cand], (len(cand), F.n), GF(F.p)).rank() == len(cand):
            basis.append(c)
            rows = cand
        if len(basis) == F.e:
            break
    return basis


def combine(values: list[RamifiedLaurent], coeffs: list[list[int]]) -> RamifiedLaurent:
    """sum_i c_i(theta) v_i for coefficient lists (low degree first)."""
    ctx = values[0].ctx
    total = RamifiedLaurent.zero(ctx)
    for v, cs in zip(values, coeffs):
        for k, c in enumerate(cs):
            if c:
                total = total + (v * theta_power(ctx, k)).scale(c)
    return total


def residual_valuation(values: list[RamifiedLaurent], coeffs: list[list[int]]) -> Fraction:
    r = combine(values, coeffs)
    v = r.vexp()
    return INF if v == INF else Fraction(v, r.ctx.M)


def linear_relations(values: list[tuple[str, RamifiedLaurent]], D: int, margin: int = 2) -> RelationBasis:
    """Nullspace over F_q of (c_i) -> sum c_i(theta) v_i truncated, with deg c_i <= D."""
    labels = [lab for lab, _ in values]
    vals = [v for _, v in values]
    ctx = vals[0].ctx
    F, M = ctx.field, ctx.M
    basis = _fq_basis(F)
    precs = [v.prec - D * M for v in vals if v.prec != INF]
    nonzero = [v for v in vals if v.terms]
    if not nonzero:
        raise InsufficientPrecision("all values vanish to the working precision")
    lo = min(v.vexp() for v in nonzero) - D * M
    if precs:
        hi = min(precs)
    else:
        hi = max(max(v.terms) for v in nonzero) + 1
    cols = []
    for i, v in enumerate(vals):
        for k in range(D + 1):
            shifted = v * theta_power(ctx, k)
            for b in basis:
                cols.append((i, k, b, shifted.scale(b) if b != 1 else shifted))
    n_unknowns = len(cols)
    # each u-exponent contributes F.n equations, but only exponents on the value lattice matter
    exps = sorted({m for *_, w in cols for m in w.terms if lo <= m < hi})
    if len(exps) * F.n < n_unknowns + margin:
        raise InsufficientPrecision(
            f"{len(exps) * F.n} constraints for {n_unknowns} unknowns: raise the precision")
    dom = GF(F.p)
    rows = []
    for m in exps:
        for coord in range(F.n):
            rows.append([dom(F.coords(w.terms.get(m, 0))[coord]) for *_, w in cols])
    mat = DomainMatrix(rows, (len(rows), n_unknowns), dom)
    null = mat.nullspace().to_Matrix()
    out = RelationBasis(labels, D, precision=Fraction(hi, M))
    if null.rows == 0:
        return out
    null = null.rref()[0]
    for r in range(null.rows):
        vec = [int(x) % F.p for x in null.row(r)]
        if not any(vec):
            continue
        coeffs: dict[str, list[int]] = {}
        polys = [[0] * (D + 1) for _ in vals]
        for (i, k, b, _), c in zip(cols, vec):
            if c:
                polys[i][k] = F.add(polys[i][k], F.mul(F.scalar(c), b))
        for lab, poly in zip(labels, polys):
            if any(poly):
                coeffs[lab] = poly
        out.relations.append(Relation(coeffs, Fraction(hi, M)))
    return out


def monomials(n_vars: int, total_degree: int) -> list[tuple[int, ...]]:
    out = []
    for deg in range(total_degree + 1):
        for combo in itertools.combinations_with_replacement(range(n_vars), deg):
            e = [0] * n_vars
            for i in combo:
                e[i] += 1
            out.append(tuple(e))
    return out


def monomial_label(labels: list[str], e: tuple[int, ...]) -> str:
    parts = [lab if k == 1 else f"{lab}^{k}" for lab, k in zip(labels, e) if k]
    return "*".join(parts) or "1"


def algebraic_relations(values: list[tuple[str, RamifiedLaurent]], total_degree: int, D: int,
                        budget: int = 4000) -> RelationBasis:
    """linear_relations applied to all monomials of total degree <= total_degree."""
    labels = [lab for lab, _ in values]
    vals = [v for _, v in values]
    mons = monomials(len(vals), total_degree)
    if len(mons) * (D + 1) > budget:
        raise BudgetExceeded(f"{len(mons)} monomials x {D + 1} coefficients exceeds {budget}")
    ctx = vals[0].ctx
    lifted = []
    for e in mons:
        val = RamifiedLaurent.one(ctx)
        for v, k in zip(vals, e):
            for _ in range(k):
                val = val * v
        lifted.append((monomial_label(labels, e), val))
    return linear_relations(lifted, D)


def relation_values(basis: RelationBasis, values: list[tuple[str, RamifiedLaurent]]) -> list[Fraction]:
    """Residual valuation of every relation of the basis against (possibly new) values."""
    lookup = dict(values)
    out = []
    for rel in basis.relations:
        vs = [lookup[lab] for lab in rel.coeffs]
        out.append(residual_valuation(vs, list(rel.coeffs.values())))
    return out


def monomial_values(values: list[tuple[str, RamifiedLaurent]], total_degree: int):
    labels = [lab for lab, _ in values]
    vals = [v for _, v in values]
    ctx = vals[0].ctx
    out = []
    for e in monomials(len(vals), total_degree):
        val = RamifiedLaurent.one(ctx)
        for v, k in zip(vals, e):
            for _ in range(k):
                val = val * v
        out.append((monomial_label(labels, e), val))
    return out


# -- span lemma ------------------------------------------------------------------------

def check_span_lemma(ctx: LaurentCtx, h: int, l: int, n: int, D: int, sign: int = -1,
                     target: RamifiedLaurent | None = None) -> CheckReport:
    """Search c in F_q[theta] (deg <= D) with c_X X = sum_{j<n} c_j d_t^(j) G|theta.

    X = d_theta^(n) Gamma + sign * d_t^(n) G|theta; the chain rule makes sign = -1 the
    combination that lands in the span.
    """
    t0 = time.perf_counter()
    q = ctx.q
    s = digits_of_fraction(q ** h, l, q)
    G = gfun(ctx, s)
    gam = gamma_arith(ctx, s)
    from .laurent import rl_theta_hyperderiv
    dG = []
    for j in range(n + 1):
        v, err = ts_eval_theta(G, j)
        dG.append(v.truncate(int(err.value * ctx.M)) if err.value != INF else v)
    if target is None:
        dgam = rl_theta_hyperderiv(gam, n)
        X = dgam + dG[n].scale(sign % ctx.p)
        cut = min(dgam.prec, dG[n].prec)
        X = X.truncate(cut)
    else:
        X = target
    vals = [("X", X)] + [(f"dG{j}", dG[j]) for j in range(n)]
    name = f"span_lemma(h={h},l={l},n={n},sign={'+' if sign == 1 else '-'})"
    if not X.terms:
        notes = ["combination vanishes to working precision"]
        return CheckReport(name, "FOUND", Fraction(X.prec, ctx.M), (time.perf_counter() - t0) * 1000, notes,
                           data={"coefficients": {"X": [1]}})
    basis = linear_relations(vals, D)
    found = [r for r in basis.relations if "X" in r.coeffs]
    status = "FOUND" if found else "NOT-FOUND"
    notes = [] if found else [f"no witness at coefficient degree <= {D} (inconclusive)"]
    data = {"coefficients": found[0].coeffs} if found else {}
    return CheckReport(name, status, basis.precision, (time.perf_counter() - t0) * 1000, notes, data=data)


# -- specializations ---------------------------------------------------------------------

def check_gamma_specialization(ctx: LaurentCtx, s: PadicDigits, threshold=None) -> CheckReport:
    """G(s)|_(t=theta) = Gamma(s) within the certified evaluation error."""
    t0 = time.perf_counter()
    G = gfun(ctx, s)
    val, err = ts_eval_theta(G)
    gam = gamma_arith(ctx, s)
    exp = rel_defect(gam, val)
    need = err.value if threshold is None else threshold
    v = INF if exp == INF else Fraction(exp, ctx.M)
    status = "PASS" if v >= min(need, Fraction(gam.prec, ctx.M)) else "FAIL"
    return CheckReport(f"gamma_specialization({s.preperiod}|{s.period})", status, v,
                       (time.perf_counter() - t0) * 1000, [f"certified error {err.value}"], exp)


def check_at_specialization(ctx: LaurentCtx, s: Index, D_max: int, weights=None,
                            literal_gamma: bool = False) -> CheckReport:
    """zeta^AT(s)|_(t=theta) = prod Pi(s_i - 1) * zeta_A(s), agreement >= 8 min(s_i).

    Agreement is the absolute valuation of the difference.
    """
    from .special import gamma_carlitz
    t0 = time.perf_counter()
    W = weights or at_weights("anderson-thakur", ctx.q)
    Z = at_series(ctx, s, W)
    val, err = ts_eval_theta(Z)
    zeta, zerr = mzv(ctx, s, D_max)
    fac = RamifiedLaurent.one(ctx)
    for si in s.parts:
        fac = fac * (gamma_carlitz(ctx, si) if literal_gamma else carlitz_factorial(ctx, si - 1))
    rhs = fac * zeta
    diff = (val - rhs).truncate(min(val.prec, rhs.prec))
    exp = diff.vexp()
    v = INF if exp == INF else Fraction(exp, ctx.M)
    need = 8 * min(s.parts)
    status = "PASS" if v >= need else "FAIL"
    return CheckReport(f"at_specialization({s}{',literal' if literal_gamma else ''})", status, v,
                       (time.perf_counter() - t0) * 1000,
                       [f"zeta truncation error {zerr.value}", f"evaluation error {err.value}"], exp)


def check_omega_pi(ctx: LaurentCtx, threshold=THRESHOLD) -> CheckReport:
    """Omega(theta) * pi~ is a nonzero constant of F_q (it is 1 with the fixed roots)."""
    t0 = time.perf_counter()
    val, err = ts_eval_theta(omega(ctx, 1, 0))
    prod = val * carlitz_pi(ctx)
    lead = prod.leading() if prod.terms else None
    one = RamifiedLaurent.one(ctx)
    exp = rel_defect(one, prod)
    rep = _finish("omega_theta_times_pi", exp, ctx.M, t0, min(threshold, err.value - 1))
    rep.data["unit"] = None if lead is None else list(lead) if isinstance(lead, tuple) else str(lead)
    return rep


# -- suite ------------------------------------------------------------------------------

DEFAULT_CONFIG = {"p": 3, "e": 1, "l": 2, "n": 1, "index_set": "1;2;1,2", "target": 200,
                  "at_target": 40, "D_max": 8, "weights": "anderson-thakur", "faults": {}}


def identity_suite(config: dict | None = None, suites=("trivializations", "gamma-identities", "specializations"),
                   pool=None) -> SuiteReport:
    """Run the configured identity checks; an empty config yields an empty report."""
    if config is not None and not config:
        return SuiteReport([])
    cfg = dict(DEFAULT_CONFIG)
    cfg.update(config or {})
    jobs = []
    if "trivializations" in suites:
        jobs += trivialization_jobs(cfg)
    if "gamma-identities" in suites:
        jobs += gamma_identity_jobs(cfg)
    if "specializations" in suites:
        jobs += specialization_jobs(cfg)
    if pool is None:
        results = [job() for job in jobs]
    else:
        results = list(pool.map(lambda job: job(), jobs))
    return SuiteReport(results)


def _fault_for(cfg: dict, name: str):
    return cfg.get("faults", {}).get(name)


def trivialization_jobs(cfg: dict) -> list:
    from .motive import (mk_M_i, mk_M_index, mk_N_derived, mk_carlitz, mk_phi_psi_l, mk_prolong,
                         verify_spec)
    p, e, l, n = cfg["p"], cfg["e"], cfg["l"], cfg["n"]
    F = ff_make(p, e)
    q = F.q
    W = at_weights(cfg["weights"], q, cfg.get("weights_path"))
    I = sub_closure(IndexSet.parse(cfg["index_set"]) if isinstance(cfg["index_set"], str) else cfg["index_set"])
    target = cfg["target"]
    C1 = ctx_for(F, q - 1, target)
    Cl = ctx_for(F, q ** l - 1, target)
    Fl = ff_make(p, e, l)
    Cxi = ctx_for(Fl, q ** l - 1, target)
    jobs = []

    def job(spec, ctx, key):
        return lambda: _report_from_motive(verify_spec(spec, ctx, perturb=_fault_for(cfg, key)))

    C = mk_carlitz(F)
    jobs.append(job(C, C1, "C"))
    for k in range(1, n + 1):
        jobs.append(job(mk_prolong(C, k), C1, f"rho_{k}(C)"))
    jobs.append(job(mk_phi_psi_l(F, l), Cxi, f"Phi_{l}"))
    jobs.append(job(mk_N_derived(F, l), Cl, f"N_{l}^({l})"))
    for s in I:
        for m in range(n + 1):
            spec = mk_M_index(F, s, m, W)
            jobs.append(job(spec, C1, spec.name))
    total = len(I) * (n + 1)
    for i in sorted({0, min(2, total), total}):
        spec = mk_M_i(F, I, n, i, W)
        jobs.append(job(spec, C1, spec.name))
    return jobs


def gamma_identity_jobs(cfg: dict) -> list:
    p, e, l = cfg["p"], cfg["e"], cfg["l"]
    F = ff_make(p, e)
    q = F.q
    Cl = ctx_for(F, q ** l - 1, cfg["target"])
    jobs = []
    for j in range(l):
        jobs.append(lambda j=j: check_prop_gam_omega(Cl, l, j, _fault_for(cfg, f"prop_gamma_omega(l={l},j={j})")
                                                     or _fault_for(cfg, "omega_l")))
    jobs.append(lambda: check_omega_product(Cl, l, _fault_for(cfg, f"omega_product(l={l})")
                                            or _fault_for(cfg, "omega_l")))
    if (q ** l - 1) % p:
        for h in range(l):
            jobs.append(lambda h=h: check_lemma_bj(Cl, l, h, min(3, q), fault=_fault_for(cfg, f"lemma_bj(h={h})")))
    return jobs


def specialization_jobs(cfg: dict) -> list:
    p, e, l = cfg["p"], cfg["e"], cfg["l"]
    F = ff_make(p, e)
    q = F.q
    jobs = []
    Cg = eval_ctx(F, q - 1, cfg["target"])
    for c in range(1, q ** l - 1, max(1, (q ** l - 2) // 4)):
        jobs.append(lambda c=c: check_gamma_specialization(Cg, digits_of_fraction(c, l, q)))
    jobs.append(lambda: check_omega_pi(Cg))
    Cat = eval_ctx(F, q - 1, cfg["at_target"])
    W = at_weights(cfg["weights"], q, cfg.get("weights_path"))
    for s in range(1, q + 1):
        jobs.append(lambda s=s: check_at_specialization(Cat, Index.of(s), cfg["D_max"], W))
    return jobs


# -- built-in value families -----------------------------------------------------------

def _eval(f: TateSeries, n: int = 0) -> RamifiedLaurent:
    v, err = ts_eval_theta(f, n)
    return v


def family_omega_products(F: FieldCtx, l: int, target=100) -> list[tuple[str, RamifiedLaurent]]:
    """Omega(theta) against the product of the twisted Omega_l values."""
    q = F.q
    ctx = eval_ctx(F, q ** l - 1, target)
    prod = None
    for j in range(l):
        v = _eval(omega(ctx, l, j))
        prod = v if prod is None else prod * v
    return [("Omega", _eval(omega(ctx, 1, 0))), ("Omega_l-product", prod)]


def family_euler_carlitz(F: FieldCtx, D_max: int = 5, M: int | None = None) -> list[tuple[str, RamifiedLaurent]]:
    """1, zeta_A(q-1) and pi~^(q-1)."""
    from .special import carlitz_zeta
    q = F.q
    M = M or q - 1
    ctx = ctx_for(F, M, (D_max + 1) * (q - 1) + 2 * q)
    z, _ = carlitz_zeta(ctx, q - 1, D_max)
    pi = carlitz_pi(ctx)
    return [("1", RamifiedLaurent.one(ctx)), (f"zeta({q - 1})", z), (f"pi^{q - 1}", pi ** (q - 1))]


def family_independent(F: FieldCtx, s: Index, l: int, n: int, target=80, weights=None):
    """Hyperderivative gamma deformation values and AT values over all subsequences of s."""
    q = F.q
    ctx = eval_ctx(F, 1, target)
    W = weights or at_weights("anderson-thakur", q)
    out = []
    for lp in range(l):
        G = gfun(ctx, digits_of_fraction(q ** lp, l, q))
        for k in range(n + 1):
            out.append((f"dt{k}G(q^{lp}/(1-q^{l}))", _eval(G, k)))
    for sub_s in subsequences(s):
        Z = at_series(ctx, sub_s, W)
        for k in range(n + 1):
            out.append((f"dt{k}zetaAT({sub_s})", _eval(Z, k)))
    return out

"""Command-line front end: compute, verify, predict and hunt."""
from __future__ import annotations

import configparser
import json
import os
import re
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, fields
from fractions import Fraction

import click

from .errors import ArtifactError, ConfigError, InsufficientPrecision
from .ffield import ff_make
from .laurent import INF
from .special import (Index, PadicDigits, at_series, at_weights, carlitz_pi, carlitz_zeta, ctx_for,
                      digits_of_fraction, eval_ctx, gamma_arith, gfun, mzv, omega)
from .tate import ts_eval_theta

SCHEMA_VERSION = 1


@dataclass
class RunConfig:
    p: int = 3
    e: int = 1
    L: int = 1
    l: int = 2
    n: int = 1
    M: int = 0
    N_t: int = 0
    target: int = 200
    at_target: int = 40
    D_max: int = 8
    index_set: str = "1;2;1,2"
    weights: str = "anderson-thakur"
    weights_path: str = ""
    out: str = ""
    threads: int = 1

    @property
    def q(self) -> int:
        return self.p ** self.e

    def check(self) -> None:
        try:
            ff_make(self.p, self.e)
        except ArtifactError as exc:
            raise ConfigError(str(exc)) from exc
        if self.l < 1 or self.n < 0 or self.target < 1 or self.threads < 1:
            raise ConfigError("l >= 1, n >= 0, target >= 1 and threads >= 1 are required")
        if self.L > 1 and self.L % self.l and self.l > 1:
            raise ConfigError(f"l={self.l} must divide L={self.L} when the primitive element is used")
        if self.weights == "user-file" and not self.weights_path:
            raise ConfigError("weights=user-file needs weights_path")

    def suite_config(self) -> dict:
        return {"p": self.p, "e": self.e, "l": self.l, "n": self.n, "index_set": self.index_set,
                "target": self.target, "at_target": self.at_target, "D_max": self.D_max,
                "weights": self.weights, "weights_path": self.weights_path or None}


def load_config(path: str | None, overrides: dict) -> RunConfig:
    """Read `key = value` lines (an optional [run] header is allowed) and apply CLI overrides."""
    values: dict = {}
    if path:
        text = open(path).read()
        if not re.search(r"^\s*\[", text, re.M):
            text = "[run]\n" + text
        cp = configparser.ConfigParser()
        cp.read_string(text)
        section = cp["run"] if "run" in cp else cp[cp.sections()[0]]
        values.update(section)
    values.update({k: v for k, v in overrides.items() if v is not None})
    types = {f.name: f.type for f in fields(RunConfig)}
    kwargs = {}
    for k, v in values.items():
        if k not in types:
            raise ConfigError(f"unknown config key {k!r}")
        kwargs[k] = int(v) if types[k] in ("int", int) else str(v)
    if "threads" not in kwargs and os.environ.get("TMF_THREADS"):
        kwargs["threads"] = int(os.environ["TMF_THREADS"])
    cfg = RunConfig(**kwargs)
    cfg.check()
    return cfg


_FRAC = re.compile(r"^\s*(.+?)\s*/\s*\(\s*1\s*-\s*q\s*\^\s*(\d+)\s*\)\s*$")


def _int_expr(text: str, q: int) -> int:
    text = text.strip()
    m = re.fullmatch(r"(-?)q\s*\^\s*(\d+)", text)
    if m:
        return (-1 if m.group(1) else 1) * q ** int(m.group(2))
    if text in ("q", "-q"):
        return q if text == "q" else -q
    return int(text)


def parse_digits(text: str, q: int) -> PadicDigits:
    """'c/(1-q^l)' with c an integer or q^k, or a plain integer."""
    m = _FRAC.match(text)
    if m:
        return digits_of_fraction(_int_expr(m.group(1), q), int(m.group(2)), q)
    return PadicDigits.from_int(_int_expr(text, q), q)


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    if out:
        with open(out, "w") as fh:
            fh.write(text + "\n")
    click.echo(text)


def _fail_config(exc: Exception) -> None:
    click.echo(f"configuration error: {exc}", err=True)
    sys.exit(2)


@click.group()
def main() -> None:
    """Exact computations with deformation series, trivializations and special values."""


_common = [
    click.option("--config", "config_path", type=click.Path(exists=True), default=None, help="key = value config file"),
    click.option("--p", type=int, default=None),
    click.option("--e", type=int, default=None),
    click.option("--q", type=int, default=None, help="shorthand for a prime q"),
    click.option("--target", type=int, default=None, help="certified precision in theta-units"),
    click.option("--out", default=None, help="output JSON path"),
]


def common(fn):
    for opt in reversed(_common):
        fn = opt(fn)
    return fn


def _overrides(p, e, q, target, out, **extra) -> dict:
    if q is not None and p is None:
        p = q
    return {"p": p, "e": e, "target": target, "out": out, **extra}


@main.command()
@click.argument("what", type=click.Choice(["omega", "gfun", "gamma", "atseries", "zeta", "mzv", "pi"]))
@common
@click.option("--l", "l_", type=int, default=1)
@click.option("--j", type=int, default=0)
@click.option("--M", "M", type=int, default=None)
@click.option("--frac", default=None, help="argument like 1/(1-q^2)")
@click.option("--index", default=None, help="index like 1,2")
@click.option("--s", "s_", type=int, default=None)
@click.option("--dmax", type=int, default=None)
@click.option("--at-theta", is_flag=True, help="evaluate the series at t = theta")
@click.option("--hyper", type=int, default=0, help="t-hyperderivative order before evaluation")
def compute(what, config_path, p, e, q, target, out, l_, j, M, frac, index, s_, dmax, at_theta, hyper):
    """Compute a series or value and print it as JSON."""
    try:
        cfg = load_config(config_path, _overrides(p, e, q, target, out))
        F = ff_make(cfg.p, cfg.e)
        qq = cfg.q
        if what == "omega":
            Mv = M or qq ** l_ - 1
            ctx = eval_ctx(F, Mv, cfg.target) if at_theta else ctx_for(F, Mv, cfg.target)
            obj = omega(ctx, l_, j)
        elif what in ("gfun", "gamma"):
            if not frac:
                raise ConfigError("--frac is required")
            s = parse_digits(frac, qq)
            ctx = eval_ctx(F, M or 1, cfg.target)
            obj = gfun(ctx, s) if what == "gfun" else gamma_arith(ctx, s)
        elif what == "atseries":
            if not index:
                raise ConfigError("--index is required")
            ctx = eval_ctx(F, M or 1, cfg.target)
            obj = at_series(ctx, Index.parse(index), at_weights(cfg.weights, qq, cfg.weights_path or None))
        elif what == "zeta":
            ctx = ctx_for(F, M or 1, cfg.target)
            obj, err = carlitz_zeta(ctx, s_ or 1, dmax if dmax is not None else cfg.D_max)
        elif what == "mzv":
            ctx = ctx_for(F, M or 1, cfg.target)
            obj, err = mzv(ctx, Index.parse(index or "1"), dmax if dmax is not None else cfg.D_max)
        else:
            ctx = ctx_for(F, M or qq - 1, cfg.target)
            obj = carlitz_pi(ctx)
    except (ArtifactError, ValueError) as exc:
        _fail_config(exc)
    result: dict = {"what": what}
    if what in ("zeta", "mzv"):
        result.update(kind="value", value=obj.to_json(), error_valuation=str(err.value))
    elif hasattr(obj, "coeffs") and (at_theta or hyper):
        val, err = ts_eval_theta(obj, hyper)
        result.update(kind="value", hyper=hyper, value=val.to_json(),
                      error_valuation="inf" if err.value == INF else str(err.value))
    elif hasattr(obj, "coeffs"):
        result.update(kind="series", value=obj.to_json())
    else:
        result.update(kind="value", value=obj.to_json(),
                      error_valuation="inf" if obj.prec == INF else str(Fraction(obj.prec, ctx.M)))
    payload = {"schema_version": SCHEMA_VERSION, "config": asdict(cfg),
               "params": {"l": l_, "j": j, "M": ctx.M, "frac": frac, "index": index, "s": s_, "hyper": hyper},
               "result": result}
    _emit(payload, cfg.out)


def _pool(cfg: RunConfig):
    return ThreadPoolExecutor(max_workers=cfg.threads) if cfg.threads > 1 else None


SUITES = {"trivializations": ("trivializations",), "gamma-identities": ("gamma-identities",),
          "specializations": ("specializations",),
          "all": ("trivializations", "gamma-identities", "specializations")}


@main.command()
@click.argument("suite", type=click.Choice(sorted(SUITES)))
@common
@click.option("--l", "l_", type=int, default=None)
@click.option("--n", type=int, default=None)
@click.option("--index-set", default=None, help='indices separated by ";" e.g. "1;2;1,2"')
@click.option("--threads", type=int, default=None)
@click.option("--fault", multiple=True, help="check=i,j (Psi entry) or check=kind (u5, sign, const)")
def verify(suite, config_path, p, e, q, target, out, l_, n, index_set, threads, fault):
    """Run an identity suite; exit 0 if every check passes, 1 otherwise."""
    from .relations import identity_suite, is_sub_closed, IndexSet
    try:
        cfg = load_config(config_path, _overrides(p, e, q, target, out, l=l_, n=n,
                                                  index_set=index_set, threads=threads))
        sc = cfg.suite_config()
        notes = []
        if not is_sub_closed(IndexSet.parse(cfg.index_set)):
            notes.append("index set replaced by its closure under contiguous sub-indices")
        sc["faults"] = _parse_faults(fault)
    except (ArtifactError, ValueError) as exc:
        _fail_config(exc)
    pool = _pool(cfg)
    try:
        rep = identity_suite(sc, SUITES[suite], pool=pool)
    finally:
        if pool is not None:
            pool.shutdown()
    records = rep.to_json()
    timing = {r["name"]: r.pop("runtime_ms") for r in records}
    payload = {"schema_version": SCHEMA_VERSION, "suite": suite, "config": asdict(cfg), "notes": notes,
               "passed": rep.passed, "reports": records, "timing_ms": timing}
    _emit(payload, cfg.out)
    sys.exit(0 if rep.passed else 1)


def _parse_faults(items) -> dict:
    out = {}
    for item in items:
        if "=" not in item:
            raise ConfigError(f"fault {item!r} must look like name=value")
        name, value = item.rsplit("=", 1)
        if re.fullmatch(r"\d+,\d+", value):
            out[name] = tuple(int(x) for x in value.split(","))
        else:
            out[name] = value
    return out


@main.command()
@click.argument("kind", type=click.Choice(["cpty", "gamma-hyper", "omega-hyper", "sub-indep", "main", "family"]))
@click.option("--s", "s_", type=int, default=1)
@click.option("--l", "l_", type=int, default=1)
@click.option("--n", type=int, default=0)
@click.option("--r", type=int, default=1)
@click.option("--q", type=int, default=3)
@click.option("--p", type=int, default=None)
@click.option("--out", default=None)
def predict(kind, s_, l_, n, r, q, p, out):
    """Print a predicted transcendence degree."""
    from . import relations as R
    p = p or q
    if kind == "cpty":
        value = R.trdeg_cpty(s_, l_, q, p)
    elif kind == "gamma-hyper":
        value = R.trdeg_gamma_hyper(l_, n)
    elif kind == "omega-hyper":
        value = R.trdeg_omega_hyper(n)
    elif kind == "sub-indep":
        value = R.trdeg_sub_indep(r, n)
    elif kind == "main":
        value = R.trdeg_main_total(r, n, l_)
    else:
        value = R.independent_family_size(r, n, l_)
    payload = {"schema_version": SCHEMA_VERSION, "kind": kind,
               "params": {"s": s_, "l": l_, "n": n, "r": r, "q": q, "p": p}, "value": value}
    if out:
        _emit(payload, out)
    else:
        click.echo(value)


@main.command()
@click.argument("family", type=click.Choice(["omega-products", "euler-carlitz", "independent", "files"]))
@common
@click.option("--l", "l_", type=int, default=2)
@click.option("--n", type=int, default=0)
@click.option("--index", default="1")
@click.option("--weight", default="q-1", help="zeta weight for euler-carlitz (only q-1)")
@click.option("--D", "D", type=int, default=3, help="coefficient degree bound")
@click.option("--degree", type=int, default=1, help="total degree of monomials")
@click.option("--dmax", type=int, default=5)
@click.option("--values", "value_files", multiple=True, type=click.Path(exists=True))
def hunt(family, config_path, p, e, q, target, out, l_, n, index, weight, D, degree, dmax, value_files):
    """Search bounded-height relations among a family of values."""
    from . import relations as R
    from .laurent import RamifiedLaurent
    try:
        cfg = load_config(config_path, _overrides(p, e, q, target, out))
        F = ff_make(cfg.p, cfg.e)
        if family == "omega-products":
            vals = R.family_omega_products(F, l_, min(cfg.target, 100))
        elif family == "euler-carlitz":
            if weight not in ("q-1", str(cfg.q - 1)):
                raise ConfigError("only the weight q-1 family is built in")
            vals = R.family_euler_carlitz(F, dmax)
        elif family == "independent":
            vals = R.family_independent(F, Index.parse(index), l_, n, min(cfg.target, 80))
        else:
            vals = []
            for path in value_files:
                data = json.load(open(path))
                value = data["result"]["value"] if "result" in data else data
                vals.append((os.path.basename(path), RamifiedLaurent.from_json(value)))
            if not vals:
                raise ConfigError("--values is required for the files family")
        basis = R.algebraic_relations(vals, degree, D) if degree > 1 else R.linear_relations(vals, D)
    except InsufficientPrecision as exc:
        click.echo(f"insufficient precision: {exc}; raise --target or --dmax", err=True)
        sys.exit(1)
    except (ArtifactError, ValueError) as exc:
        _fail_config(exc)
    payload = {"schema_version": SCHEMA_VERSION, "family": family, "config": asdict(cfg),
               "params": {"l": l_, "n": n, "index": index, "D": D, "degree": degree, "dmax": dmax},
               "basis": basis.to_json()}
    _emit(payload, cfg.out)


if __name__ == "__main__":
    main()

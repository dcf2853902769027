"""Finite fields F_{q^L} with q = p^e, stored as polynomials over F_p.

Elements are encoded as integers: the coordinate vector (c_0, ..., c_{n-1})
of c_0 + c_1 x + ... + c_{n-1} x^{n-1} maps to sum c_i p^i.  Small fields get
log/antilog caches; larger ones fall back to plain polynomial arithmetic.
"""
from __future__ import annotations

import itertools
from fractions import Fraction
from functools import lru_cache

import sympy

from .errors import DenominatorDivisibleByP, NoSuchSubfield, NotPrime

_TABLE_LIMIT = 1 << 16
_ADD_TABLE_LIMIT = 256


def _poly_mulmod(a: list[int], b: list[int], mod: list[int], p: int) -> list[int]:
    n = len(mod) - 1
    prod = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    prod[i + j] = (prod[i + j] + x * y) % p
    for k in range(len(prod) - 1, n - 1, -1):
        c = prod[k]
        if c:
            for j in range(n + 1):
                prod[k - n + j] = (prod[k - n + j] - c * mod[j]) % p
    out = prod[:n]
    return out + [0] * (n - len(out))


def lowest_irreducible(p: int, n: int) -> list[int]:
    """Lowest monic irreducible polynomial of degree n over F_p.

    Candidates are ordered by the integer sum c_i p^i of their non-leading
    coefficients.  Coefficients are returned low degree first.
    """
    x = sympy.Symbol("x")
    for code in range(p ** n):
        coeffs = [(code // p ** i) % p for i in range(n)] + [1]
        if n == 1:
            return coeffs
        poly = sympy.Poly(list(reversed(coeffs)), x, modulus=p)
        if poly.is_irreducible:
            return coeffs
    raise AssertionError("no irreducible polynomial found")


class FieldCtx:
    """Arithmetic context for F_{q^L}, q = p^e, built as F_p[x]/(modulus)."""

    def __init__(self, p: int, e: int = 1, L: int = 1, modulus: list[int] | None = None):
        if not sympy.isprime(p):
            raise NotPrime(f"{p} is not prime")
        if e < 1 or L < 1:
            raise ValueError("exponent and extension degree must be positive")
        self.p = p
        self.e = e
        self.L = L
        self.q = p ** e
        self.n = e * L
        self.size = p ** self.n
        if modulus is None:
            modulus = lowest_irreducible(p, self.n)
        else:
            modulus = [c % p for c in modulus]
            x = sympy.Symbol("x")
            if len(modulus) != self.n + 1 or modulus[-1] != 1:
                raise ValueError("modulus must be monic of degree e*L")
            if self.n > 1 and not sympy.Poly(list(reversed(modulus)), x, modulus=p).is_irreducible:
                raise ValueError("modulus is reducible")
        self.modulus = tuple(modulus)
        self.prime = self.n == 1
        self._log = self._exp = None
        self._add = None
        if not self.prime and self.size <= _TABLE_LIMIT:
            self._build_tables()

    # -- encoding -----------------------------------------------------------
    def coords(self, a: int) -> list[int]:
        p = self.p
        return [(a // p ** i) % p for i in range(self.n)]

    def encode(self, coords) -> int:
        p = self.p
        out = 0
        for i, c in enumerate(coords):
            out += (c % p) * p ** i
        return out

    def _build_tables(self) -> None:
        order = self.size - 1
        # find a generator by brute force using slow multiplication
        fac = sympy.factorint(order)
        gen = None
        for cand in range(2, self.size):
            if all(self._slow_pow(cand, order // r) != 1 for r in fac):
                gen = cand
                break
        if gen is None:  # F_2 style degenerate cases never reach here
            gen = 1
        exp = [0] * (2 * order)
        log = [0] * self.size
        cur = 1
        for k in range(order):
            exp[k] = cur
            log[cur] = k
            cur = self._slow_mul(cur, gen)
        for k in range(order, 2 * order):
            exp[k] = exp[k - order]
        self._exp, self._log = exp, log
        if self.size <= _ADD_TABLE_LIMIT:
            self._add = [[self._slow_add(a, b) for b in range(self.size)] for a in range(self.size)]

    def _slow_add(self, a: int, b: int) -> int:
        return self.encode([x + y for x, y in zip(self.coords(a), self.coords(b))])

    def _slow_mul(self, a: int, b: int) -> int:
        if self.prime:
            return a * b % self.p
        return self.encode(_poly_mulmod(self.coords(a), self.coords(b), list(self.modulus), self.p))

    def _slow_pow(self, a: int, k: int) -> int:
        result, base = 1, a
        while k:
            if k & 1:
                result = self._slow_mul(result, base)
            base = self._slow_mul(base, base)
            k >>= 1
        return result

    # -- arithmetic on codes --------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.prime:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        if self._add is not None:
            return self._add[a][b]
        return self._slow_add(a, b)

    def neg(self, a: int) -> int:
        if self.prime:
            return (-a) % self.p
        if self.p == 2:
            return a
        return self.encode([-c for c in self.coords(a)])

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def mul(self, a: int, b: int) -> int:
        if self.prime:
            return a * b % self.p
        if a == 0 or b == 0:
            return 0
        if self._log is not None:
            return self._exp[self._log[a] + self._log[b]]
        return self._slow_mul(a, b)

    def pow(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        if self.prime:
            return pow(a, k, self.p)
        if a == 0:
            return 1 if k == 0 else 0
        if self._log is not None:
            return self._exp[(self._log[a] * k) % (self.size - 1)]
        return self._slow_pow(a, k)

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("inverse of zero in finite field")
        if self.prime:
            return pow(a, -1, self.p)
        if self._log is not None:
            return self._exp[(self.size - 1 - self._log[a]) % (self.size - 1)]
        return self._slow_pow(a, self.size - 2)

    def scalar(self, c: int) -> int:
        """Embed an integer (mod p) into the field."""
        return c % self.p

    def frob(self, a: int, k: int) -> int:
        """a^(q^k); negative k uses that Frobenius has order L."""
        k %= self.L
        if k == 0 or a == 0:
            return a
        if self.prime:
            return a
        return self.pow(a, self.q ** k)

    def in_subfield(self, a: int, l: int) -> bool:
        return self.pow(a, self.q ** l) == a

    # -- values -----------------------------------------------------------------
    def __call__(self, value) -> FFElem:
        if isinstance(value, FFElem):
            return value
        if isinstance(value, (list, tuple)):
            return FFElem(self, self.encode(value))
        return FFElem(self, self.scalar(int(value)))

    def zero(self) -> FFElem:
        return FFElem(self, 0)

    def one(self) -> FFElem:
        return FFElem(self, 1)

    def elements(self):
        """All field elements in coordinate-lex order."""
        for tup in itertools.product(range(self.p), repeat=self.n):
            yield FFElem(self, self.encode(tup))

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldCtx) and (self.p, self.e, self.L, self.modulus) == (
            other.p, other.e, other.L, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.L, self.modulus))

    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, e={self.e}, L={self.L}, modulus={list(self.modulus)})"

    def to_json(self) -> dict:
        return {"p": self.p, "e": self.e, "L": self.L, "modulus": list(self.modulus)}

    @classmethod
    def from_json(cls, data: dict) -> FieldCtx:
        return cls(data["p"], data["e"], data["L"], data["modulus"])


class FFElem:
    """An element of a FieldCtx; arithmetic is closed within the context."""

    __slots__ = ("ctx", "code")

    def __init__(self, ctx: FieldCtx, code: int):
        self.ctx = ctx
        self.code = code

    @property
    def coords(self) -> list[int]:
        return self.ctx.coords(self.code)

    def _lift(self, other) -> int:
        if isinstance(other, FFElem):
            if other.ctx != self.ctx:
                raise ValueError("elements from different fields")
            return other.code
        return self.ctx.scalar(int(other))

    def __add__(self, other):
        return FFElem(self.ctx, self.ctx.add(self.code, self._lift(other)))

    __radd__ = __add__

    def __sub__(self, other):
        return FFElem(self.ctx, self.ctx.sub(self.code, self._lift(other)))

    def __rsub__(self, other):
        return FFElem(self.ctx, self.ctx.sub(self._lift(other), self.code))

    def __neg__(self):
        return FFElem(self.ctx, self.ctx.neg(self.code))

    def __mul__(self, other):
        return FFElem(self.ctx, self.ctx.mul(self.code, self._lift(other)))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return FFElem(self.ctx, self.ctx.mul(self.code, self.ctx.inv(self._lift(other))))

    def __pow__(self, k: int):
        return FFElem(self.ctx, self.ctx.pow(self.code, k))

    def inverse(self) -> FFElem:
        return FFElem(self.ctx, self.ctx.inv(self.code))

    def __eq__(self, other) -> bool:
        if isinstance(other, FFElem):
            return self.ctx == other.ctx and self.code == other.code
        if isinstance(other, int):
            return self.code == self.ctx.scalar(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ctx, self.code))

    def __bool__(self) -> bool:
        return self.code != 0

    def __repr__(self) -> str:
        if self.ctx.prime:
            return f"FFElem({self.code} mod {self.ctx.p})"
        return f"FFElem({self.coords})"


def ff_make(p: int, e: int = 1, L: int = 1) -> FieldCtx:
    return FieldCtx(p, e, L)


def ff_frobenius(x: FFElem, n: int) -> FFElem:
    """x^(q^n) for any integer n."""
    return FFElem(x.ctx, x.ctx.frob(x.code, n))


@lru_cache(maxsize=None)
def _prime_factors(n: int) -> tuple[int, ...]:
    return tuple(sorted(sympy.factorint(n)))


def multiplicative_order(x: FFElem) -> int:
    if not x:
        raise ZeroDivisionError("zero has no multiplicative order")
    ctx = x.ctx
    order = ctx.size - 1
    for r in _prime_factors(order) if order > 1 else ():
        while order % r == 0 and ctx.pow(x.code, order // r) == 1:
            order //= r
    return order


def ff_primitive(ctx: FieldCtx, l: int) -> FFElem:
    """Smallest generator (coordinate-lex order) of the multiplicative group of F_{q^l}."""
    if l < 1 or ctx.L % l:
        raise NoSuchSubfield(f"F_q^{l} is not a subfield of F_q^{ctx.L}")
    target = ctx.q ** l - 1
    factors = _prime_factors(target) if target > 1 else ()
    for x in ctx.elements():
        if not x or not ctx.in_subfield(x.code, l):
            continue
        if all(ctx.pow(x.code, target // r) != 1 for r in factors):
            return x
    raise AssertionError("multiplicative group has no generator")


def _padic_residue(x, p: int, k: int) -> int:
    """Representative in [0, p^k) of an integer or p-integral rational x."""
    mod = p ** k
    if isinstance(x, tuple):
        x = Fraction(*x)
    if isinstance(x, Fraction):
        if x.denominator % p == 0:
            raise DenominatorDivisibleByP(f"{x} is not p-integral for p={p}")
        return x.numerator * pow(x.denominator, -1, mod) % mod
    return int(x) % mod


def lucas_binom(x, n: int, p: int) -> int:
    """binom(x, n) mod p for x in Z_p (int, Fraction or (a, b) pair).

    Nonnegative integers x < n give 0, matching the usual convention.
    """
    if n < 0:
        return 0
    if n == 0:
        if isinstance(x, (Fraction, tuple)):
            _padic_residue(x, p, 1)
        return 1
    k = 1
    while p ** k <= n:
        k += 1
    k += 1
    r = _padic_residue(x, p, k)
    result = 1
    for _ in range(k):
        ri, ni = r % p, n % p
        if ni > ri:
            return 0
        result = result * _small_binom(ri, ni) % p
        r //= p
        n //= p
    return result % p


@lru_cache(maxsize=None)
def _small_binom(a: int, b: int) -> int:
    from math import comb
    return comb(a, b)

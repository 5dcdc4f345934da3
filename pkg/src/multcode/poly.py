"""Polynomials, Hasse derivatives, multiplicities and line restrictions.

Multi-indices are ordered graded-lex everywhere: by weight, then
lexicographically on the exponent tuple.  Symbols, files and linear systems
all use that order.
"""

from __future__ import annotations

import json
import math
from functools import lru_cache
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .gf import PrimeField, prime_field

INFINITY = math.inf


class MultiIndex(tuple):
    """Exponent tuple with its weight cached."""

    def __new__(cls, exps: Iterable[int]):
        self = super().__new__(cls, (int(e) for e in exps))
        if any(e < 0 for e in self):
            raise ValueError("negative exponent in %r" % (tuple(self),))
        return self

    @property
    def exps(self) -> tuple[int, ...]:
        return tuple(self)

    @property
    def wt(self) -> int:
        return sum(self)

    def sortkey(self):
        return (self.wt, tuple(self))


def wt(i: Sequence[int]) -> int:
    return sum(i)


def graded_key(i: Sequence[int]):
    return (sum(i), tuple(i))


@lru_cache(maxsize=None)
def exact_weight(m: int, w: int) -> tuple[tuple[int, ...], ...]:
    """All m-tuples of weight exactly ``w`` in lex order."""
    if m == 0:
        return ((),) if w == 0 else ()
    if m == 1:
        return ((w,),)
    out = []
    for first in range(w + 1):
        for rest in exact_weight(m - 1, w - first):
            out.append((first,) + rest)
    return tuple(out)


@lru_cache(maxsize=None)
def multi_indices(m: int, s: int) -> tuple[tuple[int, ...], ...]:
    """Multi-indices with ``wt < s`` in graded-lex order (the symbol layout)."""
    return tuple(i for w in range(s) for i in exact_weight(m, w))


@lru_cache(maxsize=None)
def monomials(m: int, d: int) -> tuple[tuple[int, ...], ...]:
    """Exponents of all monomials of total degree ``<= d``, graded-lex."""
    return multi_indices(m, d + 1)


@lru_cache(maxsize=None)
def index_of(m: int, s: int) -> dict:
    return {i: k for k, i in enumerate(multi_indices(m, s))}


@lru_cache(maxsize=1 << 16)
def binom_mod(n: int, k: int, p: int) -> int:
    """``C(n, k) mod p`` by Lucas' theorem."""
    if k < 0 or k > n:
        return 0
    out = 1
    while n or k:
        nd, kd = n % p, k % p
        if kd > nd:
            return 0
        out = out * math.comb(nd, kd) % p
        n //= p
        k //= p
    return out


def multi_binom(n: Sequence[int], k: Sequence[int], p: int) -> int:
    """``prod_j C(n_j, k_j) mod p``."""
    out = 1
    for a, b in zip(n, k):
        out = out * binom_mod(a, b, p) % p
        if not out:
            return 0
    return out


class MVPoly:
    """Sparse multivariate polynomial; ``terms`` maps exponent tuples to
    nonzero coefficient codes of ``field``."""

    __slots__ = ("field", "m", "terms")

    def __init__(self, field, m: int, terms: Mapping[Sequence[int], int] | None = None):
        self.field = field
        self.m = m
        clean = {}
        for e, c in (terms or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != m:
                raise ValueError("exponent %r has wrong length for m=%d" % (e, m))
            c = int(c)
            if not 0 <= c < field.order:
                if isinstance(field, PrimeField):
                    c %= field.order
                else:
                    raise ValueError("coefficient code %d out of range" % c)
            if c:
                clean[e] = c
        self.terms = clean

    # --- constructors ---

    @classmethod
    def zero(cls, field, m: int) -> "MVPoly":
        return cls(field, m)

    @classmethod
    def constant(cls, field, m: int, c: int) -> "MVPoly":
        return cls(field, m, {(0,) * m: c})

    @classmethod
    def variable(cls, field, m: int, j: int) -> "MVPoly":
        e = [0] * m
        e[j] = 1
        return cls(field, m, {tuple(e): 1})

    @classmethod
    def from_coeff_vector(cls, field, m: int, d: int, vec) -> "MVPoly":
        return cls(field, m, dict(zip(monomials(m, d), (int(v) for v in vec))))

    @classmethod
    def random(cls, field, m: int, d: int, rng: np.random.Generator, density: float = 1.0) -> "MVPoly":
        mons = monomials(m, d)
        vals = field.random(rng, len(mons))
        if density < 1.0:
            vals = np.where(rng.random(len(mons)) < density, vals, 0)
        return cls(field, m, dict(zip(mons, vals.tolist())))

    def coeff_vector(self, d: int) -> np.ndarray:
        if self.degree() > d:
            raise ValueError("degree %s exceeds %d" % (self.degree(), d))
        return np.array([self.terms.get(e, 0) for e in monomials(self.m, d)], dtype=np.int64)

    # --- basic structure ---

    def degree(self):
        """Total degree; ``-inf`` for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-math.inf)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (
            isinstance(other, MVPoly)
            and self.field == other.field
            and self.m == other.m
            and self.terms == other.terms
        )

    def __hash__(self):
        return hash((self.m, frozenset(self.terms.items())))

    def __repr__(self):
        if not self.terms:
            return "MVPoly(0)"
        parts = []
        for e in sorted(self.terms, key=graded_key, reverse=True):
            mono = "*".join(
                "X%d^%d" % (j + 1, k) if k > 1 else "X%d" % (j + 1) for j, k in enumerate(e) if k
            )
            parts.append("%d*%s" % (self.terms[e], mono) if mono else str(self.terms[e]))
        return "MVPoly(%s)" % " + ".join(parts)

    def _check(self, other: "MVPoly"):
        if self.field != other.field or self.m != other.m:
            raise ValueError("incompatible polynomials")

    def __add__(self, other: "MVPoly") -> "MVPoly":
        self._check(other)
        F = self.field
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = F.add(out.get(e, 0), c)
        return MVPoly(F, self.m, out)

    def __neg__(self) -> "MVPoly":
        F = self.field
        return MVPoly(F, self.m, {e: F.neg(c) for e, c in self.terms.items()})

    def __sub__(self, other: "MVPoly") -> "MVPoly":
        return self + (-other)

    def __mul__(self, other) -> "MVPoly":
        F = self.field
        if isinstance(other, int):
            return MVPoly(F, self.m, {e: F.mul(c, other % F.order) for e, c in self.terms.items()})
        self._check(other)
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = F.add(out.get(e, 0), F.mul(c1, c2))
        return MVPoly(F, self.m, out)

    __rmul__ = __mul__

    def scale(self, c: int) -> "MVPoly":
        return self * int(c)

    # --- evaluation ---

    def __call__(self, point: Sequence[int]) -> int:
        F = self.field
        point = [int(x) for x in point]
        if len(point) != self.m:
            raise ValueError("point has wrong dimension")
        powers = [{} for _ in range(self.m)]
        acc = 0
        for e, c in self.terms.items():
            t = c
            for j, k in enumerate(e):
                if k:
                    pj = powers[j]
                    if k not in pj:
                        pj[k] = F.pow(point[j], k)
                    t = F.mul(t, pj[k])
                    if not t:
                        break
            acc = F.add(acc, t)
        return acc

    # --- derivatives ---

    def hasse(self, i: Sequence[int]) -> "MVPoly":
        return hasse_derivative(self, i)

    # --- serialization ---

    def to_json(self) -> str:
        if not isinstance(self.field, PrimeField):
            raise ValueError("only polynomials over prime fields are serialized")
        terms = [{"exp": list(e), "c": self.terms[e]} for e in sorted(self.terms, key=graded_key)]
        return json.dumps({"q": self.field.q, "m": self.m, "terms": terms})

    @classmethod
    def from_json(cls, text: str) -> "MVPoly":
        obj = json.loads(text)
        q, m = int(obj["q"]), int(obj["m"])
        F = prime_field(q)
        terms = {}
        for t in obj["terms"]:
            e = tuple(int(x) for x in t["exp"])
            c = int(t["c"])
            if len(e) != m or any(x < 0 for x in e):
                raise ValueError("bad exponent %r" % (e,))
            if not 0 <= c < q:
                raise ValueError("coefficient %d out of range" % c)
            if e in terms:
                raise ValueError("duplicate exponent %r" % (e,))
            terms[e] = c
        return cls(F, m, terms)


def hasse_derivative(P: MVPoly, i: Sequence[int]) -> MVPoly:
    """The Hasse derivative ``P^(i)``: coefficient of ``Z^i`` in ``P(X + Z)``."""
    i = tuple(int(x) for x in i)
    if len(i) != P.m:
        raise ValueError("multi-index has wrong length")
    F = P.field
    p = F.p
    out = {}
    for e, c in P.terms.items():
        if all(a >= b for a, b in zip(e, i)):
            b = multi_binom(e, i, p)
            if b:
                out[tuple(a - b_ for a, b_ in zip(e, i))] = F.mul(c, F.from_int(b))
    return MVPoly(F, P.m, out)


def order_s_evaluation(P: MVPoly, a: Sequence[int], s: int) -> np.ndarray:
    """``<P^(i)(a)>`` over ``wt(i) < s`` in graded-lex order."""
    if s < 1:
        raise ValueError("order must be >= 1")
    F = P.field
    idx = multi_indices(P.m, s)
    pos = index_of(P.m, s)
    out = [0] * len(idx)
    a = [int(x) for x in a]
    for e, c in P.terms.items():
        for i in idx:
            if all(x >= y for x, y in zip(e, i)):
                b = multi_binom(e, i, F.p)
                if b:
                    t = F.mul(c, F.from_int(b))
                    for j in range(P.m):
                        k = e[j] - i[j]
                        if k:
                            t = F.mul(t, F.pow(a[j], k))
                    out[pos[i]] = F.add(out[pos[i]], t)
    return np.array(out, dtype=np.int64)


def multiplicity(P: MVPoly, a: Sequence[int]):
    """Largest ``M`` with ``P^(i)(a) = 0`` for all ``wt(i) < M``;
    ``INFINITY`` for the zero polynomial."""
    if P.is_zero():
        return INFINITY
    for w in range(int(P.degree()) + 1):
        for i in exact_weight(P.m, w):
            if hasse_derivative(P, i)(a):
                return w
    raise AssertionError("nonzero polynomial with all derivatives vanishing")  # unreachable


class UVPoly:
    """Dense univariate polynomial; ``coeffs`` low-to-high, trimmed."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs: Iterable[int] = ()):
        self.field = field
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.coeffs = c

    @classmethod
    def monomial(cls, field, k: int, c: int = 1) -> "UVPoly":
        return cls(field, [0] * k + [c])

    def degree(self):
        return len(self.coeffs) - 1 if self.coeffs else -math.inf

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, j: int) -> int:
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else 0

    def __eq__(self, other):
        return isinstance(other, UVPoly) and self.field == other.field and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(self.coeffs))

    def __repr__(self):
        return "UVPoly(%r)" % (self.coeffs,)

    def __add__(self, other: "UVPoly") -> "UVPoly":
        F = self.field
        n = max(len(self.coeffs), len(other.coeffs))
        return UVPoly(F, [F.add(self.coeff(k), other.coeff(k)) for k in range(n)])

    def __neg__(self):
        return UVPoly(self.field, [self.field.neg(c) for c in self.coeffs])

    def __sub__(self, other: "UVPoly") -> "UVPoly":
        return self + (-other)

    def __mul__(self, other) -> "UVPoly":
        F = self.field
        if isinstance(other, int):
            return UVPoly(F, [F.mul(c, other) for c in self.coeffs])
        if not self.coeffs or not other.coeffs:
            return UVPoly(F)
        a = np.array(self.coeffs, dtype=np.int64)
        b = np.array(other.coeffs, dtype=np.int64)
        return UVPoly(F, poly_mul(F, a, b).tolist())

    def __divmod__(self, other: "UVPoly"):
        q, r = poly_divmod(self.field, np.array(self.coeffs, dtype=np.int64), np.array(other.coeffs, dtype=np.int64))
        return UVPoly(self.field, q.tolist()), UVPoly(self.field, r.tolist())

    def __call__(self, x: int) -> int:
        F = self.field
        acc = 0
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, x), c)
        return acc

    def eval_many(self, xs) -> np.ndarray:
        F = self.field
        xs = np.asarray(xs, dtype=np.int64)
        acc = np.zeros_like(xs)
        for c in reversed(self.coeffs):
            acc = F.add(F.mul(acc, xs), np.full_like(xs, c))
        return acc

    def hasse(self, k: int) -> "UVPoly":
        F = self.field
        return UVPoly(
            F, [F.mul(self.coeffs[j + k], F.from_int(binom_mod(j + k, k, F.p))) for j in range(len(self.coeffs) - k)]
        )

    def to_mv(self) -> MVPoly:
        return MVPoly(self.field, 1, {(k,): c for k, c in enumerate(self.coeffs)})


def poly_mul(F, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if len(a) == 0 or len(b) == 0:
        return np.zeros(0, dtype=np.int64)
    if F.m == 1 and (F.p - 1) ** 2 * min(len(a), len(b)) < 2 ** 62:
        return np.convolve(a, b) % F.p
    out = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    for k, c in enumerate(a):
        if c:
            out[k:k + len(b)] = F.add(out[k:k + len(b)], F.mul(np.full(len(b), c), b))
    return out


def poly_divmod(F, num: np.ndarray, den: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Long division of low-to-high coefficient arrays."""
    den = np.trim_zeros(np.asarray(den, dtype=np.int64), "b")
    num = np.trim_zeros(np.asarray(num, dtype=np.int64), "b").copy()
    if den.size == 0:
        raise ZeroDivisionError("polynomial division by zero")
    dd = len(den) - 1
    if len(num) <= dd:
        return np.zeros(0, dtype=np.int64), num
    inv_lead = F.inv(int(den[-1]))
    quot = np.zeros(len(num) - dd, dtype=np.int64)
    for k in range(len(num) - 1, dd - 1, -1):
        c = int(num[k])
        if c:
            c = F.mul(c, inv_lead)
            quot[k - dd] = c
            num[k - dd:k + 1] = F.sub(num[k - dd:k + 1], F.mul(np.full(dd + 1, c), den))
    return np.trim_zeros(quot, "b"), np.trim_zeros(num[:dd], "b")


def _uv_pow_cache(F, a: int, b: int, kmax: int) -> list[UVPoly]:
    base = UVPoly(F, [a, b])
    out = [UVPoly(F, [1])]
    for _ in range(kmax):
        out.append(out[-1] * base)
    return out


def restrict_to_line(P: MVPoly, a: Sequence[int], b: Sequence[int]) -> UVPoly:
    """``Q(T) = P(a + bT)`` by direct substitution."""
    F = P.field
    deg = max((max(e) for e in P.terms), default=0)
    pows = [_uv_pow_cache(F, int(a[j]), int(b[j]), deg) for j in range(P.m)]
    acc = np.zeros(int(max(P.degree(), 0)) + 1, dtype=np.int64)
    for e, c in P.terms.items():
        t = UVPoly(F, [c])
        for j, k in enumerate(e):
            if k:
                t = t * pows[j][k]
        acc[: len(t.coeffs)] = F.add(acc[: len(t.coeffs)], np.array(t.coeffs, dtype=np.int64))
    return UVPoly(F, acc.tolist())


def line_jet_coefficients(P: MVPoly, a: Sequence[int], b: Sequence[int], l: Sequence[int], j: int) -> int:
    """``sum_{wt(i)=j} C(l+i, l) P^(l+i)(a) b^i``: the ``T^j`` coefficient of
    ``P^(l)(a + bT)``."""
    F = P.field
    l = tuple(l)
    acc = 0
    if j < 0:
        return 0
    for i in exact_weight(P.m, j):
        li = tuple(x + y for x, y in zip(l, i))
        coef = multi_binom(li, l, F.p)
        if not coef:
            continue
        t = F.mul(F.from_int(coef), hasse_derivative(P, li)(a))
        for k in range(P.m):
            if i[k]:
                t = F.mul(t, F.pow(int(b[k]), i[k]))
        acc = F.add(acc, t)
    return acc


def monomial_power(F, point: Sequence[int], e: Sequence[int]) -> int:
    t = 1
    for x, k in zip(point, e):
        if k:
            t = F.mul(t, F.pow(int(x), k))
    return t

"""Multiplicity-code parameters, the encoder, and codeword files.

Coordinates are the points of F_q^m in lexicographic order with the first
coordinate most significant, i.e. point ``a`` has index
``sum_j a_j q^(m-j)``.  Each symbol lists ``P^(i)(a)`` for ``wt(i) < s``
in graded-lex order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from ._kernels import matmul_prime
from .gf import is_prime, prime_field
from .poly import MVPoly, binom_mod, monomials, multi_indices

MAX_CELLS = 10 ** 8


def max_cells() -> int:
    import os

    return int(os.environ.get("MULTCODE_MAX_CELLS", MAX_CELLS))


@dataclass(frozen=True)
class CodeParams:
    q: int
    m: int
    s: int
    d: int

    def __post_init__(self):
        if not is_prime(self.q):
            raise ValueError("q must be prime, got %d" % self.q)
        if self.m < 1 or self.s < 1 or self.d < 0:
            raise ValueError("need m >= 1, s >= 1, d >= 0")
        if self.d >= self.s * self.q:
            raise ValueError("need d < s*q for positive distance (d=%d, sq=%d)" % (self.d, self.s * self.q))

    @property
    def field(self):
        return prime_field(self.q)

    @property
    def n(self) -> int:
        return self.q ** self.m

    @property
    def sym_len(self) -> int:
        return math.comb(self.m + self.s - 1, self.m)

    @property
    def dim(self) -> int:
        return math.comb(self.d + self.m, self.m)

    @property
    def delta(self) -> Fraction:
        return 1 - Fraction(self.d, self.s * self.q)


def rate_and_distance(params: CodeParams) -> tuple[Fraction, Fraction]:
    """Exact rate ``C(d+m,m) / (C(s+m-1,m) q^m)`` and distance ``1 - d/(sq)``."""
    rate = Fraction(params.dim, params.sym_len * params.n)
    return rate, params.delta


def rate_lower_bound(params: CodeParams) -> Fraction:
    """``(s/(m+s))^m (d/(sq))^m``."""
    s, m = params.s, params.m
    return Fraction(s, m + s) ** m * Fraction(params.d, s * params.q) ** m


@lru_cache(maxsize=32)
def all_points(q: int, m: int) -> np.ndarray:
    """Points of F_q^m in coordinate order, shape ``(q^m, m)``."""
    grid = np.indices((q,) * m).reshape(m, -1).T
    return np.ascontiguousarray(grid, dtype=np.int64)


def point_index(point, q: int) -> int:
    idx = 0
    for x in point:
        idx = idx * q + int(x)
    return idx


@lru_cache(maxsize=64)
def _monomial_index_table(m: int, d: int) -> np.ndarray:
    table = np.full((d + 1,) * m, -1, dtype=np.int64)
    for k, e in enumerate(monomials(m, d)):
        table[e] = k
    return table


@lru_cache(maxsize=16)
def _jet_tables(q: int, m: int, s: int, d: int):
    mons = np.array(monomials(m, d), dtype=np.int64).reshape(-1, m)
    idx = multi_indices(m, s)
    lookup = _monomial_index_table(m, d)
    binom = np.array([[binom_mod(n, k, q) for k in range(s)] for n in range(d + 1)], dtype=np.int64)
    tables = []
    for i in idx:
        iv = np.array(i, dtype=np.int64)
        ok = np.all(mons >= iv, axis=1)
        src = np.nonzero(ok)[0]
        shifted = mons[src] - iv
        dst = lookup[tuple(shifted.T)]
        w = np.ones(len(src), dtype=np.int64)
        for j in range(m):
            w = w * binom[mons[src, j], i[j]] % q
        tables.append((src, dst, w))
    return tables


def jet_coefficients(P: MVPoly, params: CodeParams) -> np.ndarray:
    """Coefficient vectors (over ``monomials(m, d)``) of every ``P^(i)``,
    ``wt(i) < s``, as columns of a ``(dim, sym_len)`` matrix."""
    q, m, s, d = params.q, params.m, params.s, params.d
    c = P.coeff_vector(d)
    out = np.zeros((len(c), params.sym_len), dtype=np.int64)
    for k, (src, dst, w) in enumerate(_jet_tables(q, m, s, d)):
        out[dst, k] = c[src] * w % q
    return out


def monomial_matrix(q: int, m: int, d: int) -> np.ndarray:
    """``V[point, mono] = a^e`` over all points and monomials of degree <= d."""
    if q ** m * math.comb(d + m, m) > max_cells():
        raise MemoryError("monomial matrix exceeds MULTCODE_MAX_CELLS")
    return _monomial_matrix(q, m, d)


@lru_cache(maxsize=8)
def _monomial_matrix(q: int, m: int, d: int) -> np.ndarray:
    pts = all_points(q, m)
    mons = np.array(monomials(m, d), dtype=np.int64).reshape(-1, m)
    pw = np.ones((q, d + 1), dtype=np.int64)
    for k in range(1, d + 1):
        pw[:, k] = pw[:, k - 1] * np.arange(q) % q
    V = np.ones((len(pts), len(mons)), dtype=np.int64)
    for j in range(m):
        V = V * pw[pts[:, j]][:, mons[:, j]] % q
    return V


@dataclass
class Codeword:
    params: CodeParams
    symbols: np.ndarray  # shape (q^m, sym_len)

    def __post_init__(self):
        self.symbols = np.asarray(self.symbols, dtype=np.int64)
        if self.symbols.shape != (self.params.n, self.params.sym_len):
            raise ValueError(
                "codeword shape %r, expected %r" % (self.symbols.shape, (self.params.n, self.params.sym_len))
            )

    def __eq__(self, other):
        return (
            isinstance(other, Codeword)
            and self.params == other.params
            and np.array_equal(self.symbols, other.symbols)
        )

    def at(self, point) -> np.ndarray:
        return self.symbols[point_index(point, self.params.q)]

    def copy(self) -> "Codeword":
        return Codeword(self.params, self.symbols.copy())

    def to_json(self) -> str:
        p = self.params
        return json.dumps({"q": p.q, "m": p.m, "s": p.s, "d": p.d, "symbols": self.symbols.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "Codeword":
        obj = json.loads(text)
        params = CodeParams(int(obj["q"]), int(obj["m"]), int(obj["s"]), int(obj["d"]))
        sym = np.array(obj["symbols"], dtype=np.int64)
        if sym.shape != (params.n, params.sym_len):
            raise ValueError("symbols array has shape %r" % (sym.shape,))
        if sym.size and (sym.min() < 0 or sym.max() >= params.q):
            raise ValueError("symbol entry out of range")
        return cls(params, sym)


def encode(params: CodeParams, P: MVPoly) -> Codeword:
    """``Enc(P)``: the order-s evaluation of ``P`` at every point."""
    if P.m != params.m or P.field != params.field:
        raise ValueError("polynomial does not match code parameters")
    if P.degree() > params.d:
        raise ValueError("deg(P) = %s exceeds d = %d" % (P.degree(), params.d))
    V = monomial_matrix(params.q, params.m, params.d)
    return Codeword(params, matmul_prime(V, jet_coefficients(P, params), params.q))


def encode_coeffs(params: CodeParams, coeffs: np.ndarray) -> np.ndarray:
    """Batch encoder: ``coeffs`` has shape ``(dim,)`` over ``monomials(m, d)``."""
    P = MVPoly.from_coeff_vector(params.field, params.m, params.d, coeffs)
    return encode(params, P).symbols


def hamming_distance(x: Codeword, y: Codeword) -> Fraction:
    """Fraction of coordinates whose full symbols differ."""
    if x.params != y.params:
        raise ValueError("codewords from different codes")
    diff = np.any(x.symbols != y.symbols, axis=1)
    return Fraction(int(diff.sum()), x.params.n)

"""Global unique decoding of multivariate multiplicity codes over F_q by
univariate decoding over F_{q^m} along trace curves.

For a basis ``A = (a_1, ..., a_m)`` of F_{q^m} over F_q the curve
``t -> (Tr(a_1 t), ..., Tr(a_m t))`` is a bijection F_{q^m} -> F_q^m, so a
received word of the m-variate code pulls back to a received word of a
univariate code with the same number of wrong coordinates.  Decoding along
a family of curves in general position determines every jet of ``P``, and
the jets determine ``P``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import linalg
from .code import CodeParams, Codeword, encode, hamming_distance, point_index
from .gf import ExtField, ext_field
from .poly import MVPoly, UVPoly, exact_weight, hasse_derivative, index_of, monomials, multi_binom, multi_indices, poly_mul
from .unidec import decode_many, uv_jets

COMPOSE_LIMIT = 20000


@dataclass(frozen=True)
class Basis:
    field: ExtField
    elems: tuple

    def __post_init__(self):
        F = self.field
        if len(self.elems) != F.m:
            raise ValueError("a basis of F_{q^%d} has %d elements" % (F.m, F.m))
        coords = np.array([F.to_coeffs(int(a)) for a in self.elems], dtype=np.int64)
        if linalg.rank(F.base, coords) != F.m:
            raise ValueError("elements %r are not an F_q-basis" % (self.elems,))

    def power(self, i) -> int:
        """``A^i = prod_j a_j^(i_j)``."""
        F = self.field
        out = 1
        for a, k in zip(self.elems, i):
            out = F.mul(out, F.pow(int(a), int(k)))
        return out


@dataclass(frozen=True)
class TraceCurve:
    basis: Basis

    @property
    def field(self) -> ExtField:
        return self.basis.field

    def points(self) -> np.ndarray:
        """``gamma(t)`` for every ``t`` (field codes in order), shape ``(q^m, m)``."""
        return _curve_points(self.basis)

    def point_indices(self) -> np.ndarray:
        F = self.field
        pw = F.q ** np.arange(F.m - 1, -1, -1, dtype=np.int64)
        return self.points() @ pw

    def inverse(self) -> np.ndarray:
        """``t`` for every point index; raises if the map is not a bijection."""
        idx = self.point_indices()
        inv = np.full(len(idx), -1, dtype=np.int64)
        inv[idx] = np.arange(len(idx), dtype=np.int64)
        if np.any(inv < 0):
            raise ArithmeticError("trace curve is not a bijection")
        return inv


@lru_cache(maxsize=64)
def _curve_points(basis: Basis) -> np.ndarray:
    F = basis.field
    ts = np.arange(F.order, dtype=np.int64)
    cols = [F.trace(F.mul(np.full(F.order, int(a), dtype=np.int64), ts)) for a in basis.elems]
    return np.stack(cols, axis=1)


@dataclass(frozen=True)
class CurveFamily:
    bases: tuple
    s: int
    c: int

    @property
    def M(self) -> int:
        return len(self.bases)

    def curves(self) -> list[TraceCurve]:
        return [TraceCurve(b) for b in self.bases]


def general_position_matrix(F: ExtField, bases, s: int, c: int) -> np.ndarray:
    """Rows ``R^(l)(A_i)`` (``wt(l) < c``) as linear forms in the coefficients
    of ``R`` over monomials of degree ``<= s``."""
    m = F.m
    mons = monomials(m, s)
    rows = []
    for basis in bases:
        for l in multi_indices(m, c):
            row = np.zeros(len(mons), dtype=np.int64)
            for u, e in enumerate(mons):
                if any(x < y for x, y in zip(e, l)):
                    continue
                coef = multi_binom(e, l, F.p)
                if coef:
                    diff = tuple(x - y for x, y in zip(e, l))
                    row[u] = F.mul(F.from_int(coef), basis.power(diff))
            rows.append(row)
    return np.array(rows, dtype=np.int64).reshape(len(rows), len(mons))


def is_general_position(family: CurveFamily, s: int | None = None, c: int | None = None) -> bool:
    """No nonzero ``R`` of degree ``<= s`` vanishes to order ``c`` at every
    basis of the family (exact rank over F_{q^m})."""
    s = family.s if s is None else s
    c = family.c if c is None else c
    if not family.bases:
        return False
    F = family.bases[0].field
    A = general_position_matrix(F, family.bases, s, c)
    return A.shape[0] > 0 and linalg.rank(F, A) == A.shape[1]


@lru_cache(maxsize=32)
def make_general_position_bases(q: int, m: int, s: int, c: int) -> CurveFamily:
    """The power basis ``(1, beta, ..., beta^(m-1))`` translated by every
    point of the grid ``{0, ..., ceil(s/c) - 1}^m``; verified before use.

    Jet recovery only needs polynomials of degree ``< s`` to be pinned down
    (it solves for homogeneous pieces of weight ``j < s``), so that is the
    degree the family is checked at.  Degree ``s`` itself cannot work when
    ``s = c``: ``(X_1 - a_1)^s`` vanishes to order ``s`` at ``a``.
    """
    if not 1 <= c <= s:
        raise ValueError("need 1 <= c <= s")
    g = -(-s // c)
    if g > q:
        raise ValueError("grid side ceil(s/c) = %d exceeds q = %d" % (g, q))
    F = ext_field(q, m)
    beta = F.generator() if m > 1 else 0
    base = [F.pow(beta, k) if k else 1 for k in range(m)]
    bases = []
    for b in np.indices((g,) * m).reshape(m, -1).T:
        elems = tuple(int(F.add(a, int(x))) for a, x in zip(base, b))
        bases.append(Basis(F, elems))
    fam = CurveFamily(tuple(bases), s, c)
    for basis in fam.bases:
        TraceCurve(basis).inverse()
    if not is_general_position(fam, s - 1, c):
        raise ArithmeticError("grid family is not in (%d, %d)-general position for q=%d, m=%d" % (s - 1, c, q, m))
    return fam


def curve_weights(basis: Basis, s: int, l, order: int) -> np.ndarray:
    """``W[k, j] = C(i + l, l) A^i`` where entry ``k`` of a symbol is
    ``i + l`` and ``j = wt(i) < order``."""
    F = basis.field
    m = F.m
    idx = index_of(m, s)
    W = np.zeros((len(idx), order), dtype=np.int64)
    for i in multi_indices(m, order):
        li = tuple(x + y for x, y in zip(i, l))
        if sum(li) >= s:
            continue
        coef = multi_binom(li, l, F.p)
        if coef:
            W[idx[li], sum(i)] = F.mul(F.from_int(coef), basis.power(i))
    return W


def curve_received_word(received: Codeword, basis: Basis, l, c: int) -> np.ndarray:
    """Pull the received word back along the curve: an ``(q^m, s - c + 1)``
    array over F_{q^m} whose row ``t`` uses the symbol at ``gamma(t)``."""
    params = received.params
    if sum(l) >= c:
        raise ValueError("need wt(l) < c")
    order = params.s - c + 1
    F = basis.field
    sym = received.symbols[TraceCurve(basis).point_indices()]
    return linalg.matmul(F, sym, curve_weights(basis, params.s, l, order))


def compose_with_curve(P: MVPoly, l, basis: Basis) -> UVPoly:
    """``P^(l)(gamma(T))`` by substituting ``X_j <- sum_k a_j^(q^k) T^(q^k)``."""
    F = basis.field
    q, m = F.q, F.m
    D = hasse_derivative(P, tuple(l))
    deg = max(int(D.degree()), 0) if not D.is_zero() else 0
    if deg * q ** (m - 1) > COMPOSE_LIMIT:
        raise MemoryError("symbolic composition of degree %d exceeds the limit" % (deg * q ** (m - 1)))
    if D.is_zero():
        return UVPoly(F, [])
    lin = []
    for a in basis.elems:
        L = np.zeros(q ** (m - 1) + 1, dtype=np.int64)
        for k in range(m):
            L[q ** k] = F.add(int(L[q ** k]), F.frobenius(int(a), k))
        lin.append(L)
    top = max(max(e) for e in D.terms)
    pows = []
    for L in lin:
        acc = [np.array([1], dtype=np.int64)]
        for _ in range(top):
            acc.append(poly_mul(F, acc[-1], L))
        pows.append(acc)
    out = np.zeros(deg * q ** (m - 1) + 1, dtype=np.int64)
    for e, coef in D.terms.items():
        t = np.array([F.from_base(coef)], dtype=np.int64)
        for j, k in enumerate(e):
            if k:
                t = poly_mul(F, t, pows[j][k])
        out[: len(t)] = F.add(out[: len(t)], t)
    return UVPoly(F, out.tolist())


@dataclass(frozen=True)
class GlobalConfig:
    params: CodeParams
    delta0: Fraction
    gamma: Fraction
    c: int

    @classmethod
    def build(cls, params: CodeParams, delta0) -> "GlobalConfig":
        """``gamma = (delta - 2 delta0)/(1 - 2 delta0)``, ``c = floor(gamma s) + 1``;
        checks that the curve code can unique-decode ``delta0`` errors."""
        delta0 = Fraction(delta0)
        delta = params.delta
        if not 0 < delta0 < Fraction(1, 2):
            raise ValueError("need 0 < delta0 < 1/2")
        gamma = (delta - 2 * delta0) / (1 - 2 * delta0)
        if gamma < 0:
            raise ValueError("delta0 is too large for this code")
        c = min(math.floor(gamma * params.s) + 1, params.s)
        cfg = cls(params, delta0, gamma, c)
        if params.m > 1 and params.s >= params.q:
            raise ValueError("need s < q")
        if cfg.curve_degree >= cfg.curve_order * params.n:
            raise ValueError("curve code has no distance: d q^(m-1) >= (s-c+1) q^m")
        if cfg.curve_half_distance <= delta0:
            raise ValueError("delta0 = %s is not below the curve code's half distance %s" % (delta0, cfg.curve_half_distance))
        return cfg

    @property
    def curve_order(self) -> int:
        return self.params.s - self.c + 1

    @property
    def curve_degree(self) -> int:
        return self.params.d * self.params.q ** (self.params.m - 1)

    @property
    def curve_half_distance(self) -> Fraction:
        return (1 - Fraction(self.curve_degree, self.curve_order * self.params.n)) / 2

    @property
    def M(self) -> int:
        return (-(-self.params.s // self.c)) ** self.params.m


@lru_cache(maxsize=16)
def _jet_solvers(family: CurveFamily, s: int):
    """Per weight ``j'``: the constraint matrix, a full-rank row subset and
    the inverse on that subset.  The matrix does not depend on the point."""
    F = family.bases[0].field
    m = F.m
    ls = multi_indices(m, family.c)
    out = []
    for jp in range(s):
        mons = exact_weight(m, jp)
        keys = []
        rows = []
        for bi, basis in enumerate(family.bases):
            for li, l in enumerate(ls):
                if sum(l) > jp:
                    continue
                row = np.zeros(len(mons), dtype=np.int64)
                for u, i in enumerate(mons):
                    if any(x < y for x, y in zip(i, l)):
                        continue
                    coef = multi_binom(i, l, F.p)
                    if coef:
                        diff = tuple(x - y for x, y in zip(i, l))
                        row[u] = F.mul(F.from_int(coef), basis.power(diff))
                keys.append((bi, li, jp - sum(l)))
                rows.append(row)
        A = np.array(rows, dtype=np.int64)
        sel = linalg.independent_rows(F, A)
        if len(sel) != len(mons):
            raise ArithmeticError("jet system for weight %d is singular" % jp)
        out.append((keys, A, sel, linalg.inverse(F, A[sel])))
    return out


def recover_jets(family: CurveFamily, params: CodeParams, line_jets: dict) -> np.ndarray | None:
    """All jets ``P^(<s)(a)`` from the decoded curve polynomials.

    ``line_jets[(i, li)]`` is the ``(q^m, s)`` array of derivatives of
    ``Q_{i,l}`` at every ``t``.  Returns ``None`` if some point's system is
    inconsistent or has a solution outside F_q.
    """
    F = family.bases[0].field
    n = params.n
    sym = np.zeros((n, params.sym_len), dtype=np.int64)
    invs = [TraceCurve(b).inverse() for b in family.bases]
    col = 0
    for keys, A, sel, Ainv in _jet_solvers(family, params.s):
        rhs = np.stack([line_jets[(bi, li)][invs[bi], j] for bi, li, j in keys])  # rows x points
        X = linalg.matmul(F, Ainv, rhs[sel])
        if not np.array_equal(linalg.matmul(F, A, X), rhs):
            return None
        if np.any(X >= F.q):
            return None
        sym[:, col:col + A.shape[1]] = X.T
        col += A.shape[1]
    return sym


def global_unique_decode(received: Codeword, delta0) -> MVPoly | None:
    """The unique ``P`` with ``Delta(Enc(P), r) < delta0``, or ``None``."""
    from .sysenc import build_interpolating_set, interpolate_from_set

    params = received.params
    cfg = GlobalConfig.build(params, delta0)
    F = ext_field(params.q, params.m)
    family = make_general_position_bases(params.q, params.m, params.s, cfg.c)
    assert family.M == cfg.M
    ls = multi_indices(params.m, cfg.c)
    line_jets = {}
    for bi, basis in enumerate(family.bases):
        words = np.stack([curve_received_word(received, basis, l, cfg.c) for l in ls])
        decoded = decode_many(F, words, cfg.curve_degree, cfg.delta0)
        for li, Q in enumerate(decoded):
            if Q is None:
                return None
            line_jets[(bi, li)] = uv_jets(F, Q, params.s)
    sym = recover_jets(family, params, line_jets)
    if sym is None:
        return None
    iset = build_interpolating_set(params)
    P = interpolate_from_set(iset, iset.read(Codeword(params, sym)))
    cw = encode(params, P)
    if not np.array_equal(cw.symbols, sym):
        return None
    if hamming_distance(cw, received) >= cfg.delta0:
        return None
    return P

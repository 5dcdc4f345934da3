"""Local correction of multivariate multiplicity codes.

The main corrector queries every point of ``|S|^m`` lines through the target
point ``a``, whose directions form an affine grid ``B``.  Each line yields,
for every ``l`` with ``wt(l) < c``, a univariate multiplicity-code word whose
decoding gives ``Q_{b,l}(T) = P^(l)(a + bT)``.  The coefficients of those
polynomials pin down the homogeneous pieces ``R_j'`` of ``P`` around ``a``,
whose coefficients are the wanted derivatives ``P^(i)(a)``.

Two cheaper variations recover only part of the jet: one random line gives
``P^(<c)(a)``, and ``m`` independent lines give ``P^(<c')(a)`` for
``c' = c m/(m-1)``.  The constant-query scheme built on the first variation
lives here too.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import linalg
from .code import CodeParams, Codeword, all_points, encode
from .gf import prime_field
from .linalg import SingularSystem
from .poly import MVPoly, binom_mod, exact_weight, index_of, multi_binom, multi_indices
from .unidec import decode_many

RETRY_BUDGET = 200


class Oracle:
    """Query access to a received word that counts every point looked at."""

    def __init__(self, word: Codeword | np.ndarray, q: int | None = None, m: int | None = None):
        if isinstance(word, Codeword):
            q, m = word.params.q, word.params.m
            word = word.symbols
        if q is None or m is None:
            raise ValueError("q and m are needed for a raw symbol array")
        self.symbols = np.asarray(word, dtype=np.int64)
        self.q, self.m = q, m
        self.queries = 0
        self._pw = q ** np.arange(m - 1, -1, -1, dtype=np.int64)

    def __call__(self, point) -> np.ndarray:
        return self.batch(np.asarray(point, dtype=np.int64)[None, :])[0]

    def batch(self, points: np.ndarray) -> np.ndarray:
        points = np.asarray(points, dtype=np.int64) % self.q
        idx = points.reshape(-1, self.m) @ self._pw
        self.queries += len(idx)
        return self.symbols[idx].reshape(points.shape[:-1] + (self.symbols.shape[1],))


@dataclass(frozen=True)
class LocalConfig:
    params: CodeParams
    delta0: Fraction
    gamma: Fraction
    c: int
    S: tuple[int, ...]
    seed: int = 0

    @classmethod
    def build(cls, params: CodeParams, delta0, seed: int = 0, c: int | None = None) -> "LocalConfig":
        """Derive ``gamma``, ``c`` and ``S`` from the error budget.

        ``c`` may be overridden (the constant-query scheme fixes it); the
        grid ``S`` is always ``{0, ..., ceil(5s/c) - 1}`` and must fit in
        F_q for the main corrector (the variations do not use it).
        """
        delta0 = Fraction(delta0)
        delta = params.delta
        if not 0 <= delta0 < delta / 8:
            raise ValueError("need 0 <= delta0 < delta/8 (delta0=%s, delta=%s)" % (delta0, delta))
        gamma = (delta - 8 * delta0) / (1 - 8 * delta0)
        if c is None:
            c = math.floor(gamma * params.s) + 1
        c = min(c, params.s)
        if c < 1:
            raise ValueError("c must be positive")
        size = -(-5 * params.s // c)
        return cls(params, delta0, gamma, c, tuple(range(size)), seed)

    @property
    def query_count(self) -> int:
        return len(self.S) ** self.params.m * self.params.q

    def line_radius(self) -> Fraction:
        return 4 * self.delta0


@dataclass
class DirectionSet:
    z: np.ndarray
    ys: np.ndarray
    B: np.ndarray  # (|S|^m, m)

    @classmethod
    def draw(cls, cfg: LocalConfig, rng: np.random.Generator) -> "DirectionSet":
        q, m = cfg.params.q, cfg.params.m
        if len(cfg.S) > q:
            raise ValueError("|S| = %d exceeds q = %d" % (len(cfg.S), q))
        S = np.array(cfg.S, dtype=np.int64)
        alphas = np.indices((len(S),) * m).reshape(m, -1).T
        alphas = S[alphas]
        want = len(S) ** m
        while True:
            z = rng.integers(0, q, size=m)
            ys = rng.integers(0, q, size=(m, m))
            B = (z[None, :] + alphas @ ys) % q
            if len(np.unique(B, axis=0)) == want:
                return cls(z, ys, B)


@dataclass
class LineTable:
    """Decoded line polynomials: ``coeffs[(k, li)]`` holds the coefficient
    array of ``Q_{b_k, l}`` (``l`` the ``li``-th index of weight ``< c``),
    or ``None`` if the line failed to decode."""

    B: np.ndarray
    ls: tuple
    coeffs: dict = field(default_factory=dict)

    def v(self, j: int, k: int, li: int):
        """Coefficient of ``T^j`` in ``Q_{b_k, l}``; ``None`` on failure."""
        Q = self.coeffs[(k, li)]
        if Q is None:
            return None
        if j < 0 or j >= len(Q):
            return 0
        return int(Q[j])

    def values(self, s: int) -> tuple[np.ndarray, np.ndarray]:
        """Dense view: ``V[k, li, j]`` for ``j < s`` and the success mask."""
        V = np.zeros((len(self.B), len(self.ls), s), dtype=np.int64)
        ok = np.ones((len(self.B), len(self.ls)), dtype=bool)
        for (k, li), Q in self.coeffs.items():
            if Q is None:
                ok[k, li] = False
                continue
            n = min(len(Q), s)
            V[k, li, :n] = Q[:n]
        return V, ok


@dataclass
class JetAnswer:
    R: list  # per weight j', coefficient vectors over exact_weight(m, j')
    u: np.ndarray  # flattened jet in graded-lex order

    @classmethod
    def from_pieces(cls, R: list) -> "JetAnswer":
        return cls(R, np.concatenate([np.asarray(r, dtype=np.int64) for r in R]))


# ---------------------------------------------------------------------------
# line words
# ---------------------------------------------------------------------------

def direction_powers(q: int, B: np.ndarray, s: int) -> np.ndarray:
    """``b^i`` for every direction and every ``wt(i) < s``."""
    B = np.asarray(B, dtype=np.int64)
    m = B.shape[1]
    idx = multi_indices(m, s)
    pw = np.ones((len(B), m, s), dtype=np.int64)
    for k in range(1, s):
        pw[:, :, k] = pw[:, :, k - 1] * B % q
    out = np.ones((len(B), len(idx)), dtype=np.int64)
    for c, i in enumerate(idx):
        for j in range(m):
            out[:, c] = out[:, c] * pw[:, j, i[j]] % q
    return out


def line_weights(q: int, m: int, s: int, l, Bpow: np.ndarray) -> np.ndarray:
    """``W[b, k, j]`` such that ``symbols_on_line @ W[b]`` is ``l_{b,l}``.

    Entry ``(k, j)`` is ``C(l+i, l) b^i`` where the ``k``-th symbol entry
    is ``l + i`` and ``j = wt(i)``.
    """
    idx = index_of(m, s)
    w = sum(l)
    sp = s - w
    W = np.zeros((Bpow.shape[0], len(idx), sp), dtype=np.int64)
    for i in multi_indices(m, sp):
        li = tuple(a + b for a, b in zip(l, i))
        coef = multi_binom(li, l, q)
        if coef:
            W[:, idx[li], sum(i)] = coef * Bpow[:, idx[i]] % q
    return W


def line_words(params: CodeParams, B: np.ndarray, symbols: np.ndarray, l) -> np.ndarray:
    """The received words ``l_{b,l}`` for every ``b``: shape ``(|B|, q, s - wt(l))``.

    ``symbols[k, t]`` is the symbol read at ``a + b_k t``.
    """
    q, m, s = params.q, params.m, params.s
    W = line_weights(q, m, s, l, direction_powers(q, B, s))
    return np.matmul(symbols, W) % q


def query_lines(oracle: Oracle, a, B: np.ndarray) -> np.ndarray:
    """Read all ``q`` points of each line ``a + bT``; shape ``(|B|, q, sym)``."""
    q = oracle.q
    a = np.asarray(a, dtype=np.int64)
    t = np.arange(q, dtype=np.int64)
    pts = (a[None, None, :] + B[:, None, :] * t[None, :, None]) % q
    return oracle.batch(pts)


def decode_lines(params: CodeParams, B, symbols, ls, radius_for) -> LineTable:
    F = params.field
    table = LineTable(np.asarray(B), tuple(ls))
    for li, l in enumerate(ls):
        w = sum(l)
        words = line_words(params, B, symbols, l)
        res = decode_many(F, words, params.d - w, radius_for(w))
        for k, Q in enumerate(res):
            table.coeffs[(k, li)] = Q
    return table


def _sub_half_distance(params: CodeParams, w: int) -> Fraction:
    """Half the distance of the order-``(s-w)``, degree-``(d-w)`` line code."""
    return (1 - Fraction(params.d - w, (params.s - w) * params.q)) / 2


# ---------------------------------------------------------------------------
# recovering the homogeneous pieces
# ---------------------------------------------------------------------------

def constraint_matrix(q: int, m: int, jp: int, ls, Bpow: np.ndarray, s: int) -> np.ndarray:
    """``A[b, li, u] = C(i_u, l) b^(i_u - l)`` for the ``u``-th monomial of
    weight ``jp``; encodes ``R^(l)(b)`` as a linear form in ``R``'s
    coefficients."""
    idx = index_of(m, s)
    mons = exact_weight(m, jp)
    A = np.zeros((Bpow.shape[0], len(ls), len(mons)), dtype=np.int64)
    for li, l in enumerate(ls):
        for u, i in enumerate(mons):
            if any(x < y for x, y in zip(i, l)):
                continue
            coef = multi_binom(i, l, q)
            if coef:
                diff = tuple(x - y for x, y in zip(i, l))
                A[:, li, u] = coef * Bpow[:, idx[diff]] % q
    return A


def jet_combination_decode(table: LineTable, c: int, s: int, q: int, rng: np.random.Generator,
                           budget: int = RETRY_BUDGET) -> JetAnswer | None:
    """Find, for each ``j' < s``, the homogeneous ``R_j'`` that satisfies all
    its line constraints on at least a third of the directions.

    Each round solves the constraints of a random minimal set of directions
    and then counts agreement over all of ``B``; at most one candidate can
    reach a third, so the first one that does is returned.
    """
    F = prime_field(q)
    B = table.B
    m = B.shape[1]
    nB = len(B)
    V, ok = table.values(s)
    Bpow = direction_powers(q, B, s)
    R = []
    for jp in range(s):
        lsel = [li for li, l in enumerate(table.ls) if sum(l) <= jp]
        ls = [table.ls[li] for li in lsel]
        A = constraint_matrix(q, m, jp, ls, Bpow, s)
        rhs = np.stack([V[:, li, jp - sum(table.ls[li])] for li in lsel], axis=1)
        good = ok[:, lsel].all(axis=1)
        cand = np.nonzero(good)[0]
        nunk = A.shape[2]
        found = None
        for _ in range(budget):
            if len(cand) * 3 < nB:
                break
            order = rng.permutation(cand)
            x = _solve_from(F, A, rhs, order, nunk)
            if x is None:
                continue
            agree = good & np.all(np.matmul(A, x) % q == rhs, axis=1)
            if 3 * int(agree.sum()) >= nB:
                found = x
                break
        if found is None:
            return None
        R.append(found)
    return JetAnswer.from_pieces(R)


def _solve_from(F, A, rhs, order, nunk):
    """Solve using directions from ``order`` until the system has full rank."""
    per = A.shape[1]
    k = max(1, -(-nunk // per))
    while k <= len(order):
        sel = order[:k]
        M = A[sel].reshape(-1, nunk)
        y = rhs[sel].reshape(-1)
        try:
            return linalg.solve(F, M, y)
        except SingularSystem as exc:
            if "inconsistent" in str(exc):
                return None
        k += 1
    return None


# ---------------------------------------------------------------------------
# public correctors
# ---------------------------------------------------------------------------

def _rng(cfg: LocalConfig, rng):
    return np.random.default_rng(cfg.seed) if rng is None else rng


def correct_at(oracle: Oracle, a, cfg: LocalConfig, rng: np.random.Generator | None = None):
    """Locally correct the full symbol ``P^(<s)(a)``; ``None`` on failure.

    Performs exactly ``|S|^m q`` oracle queries.
    """
    params = cfg.params
    rng = _rng(cfg, rng)
    before = oracle.queries
    dirs = DirectionSet.draw(cfg, rng)
    symbols = query_lines(oracle, a, dirs.B)
    assert oracle.queries - before == cfg.query_count
    ls = multi_indices(params.m, cfg.c)
    radius = cfg.line_radius()
    table = decode_lines(params, dirs.B, symbols, ls, lambda w: radius)
    ans = jet_combination_decode(table, cfg.c, params.s, params.q, rng)
    return None if ans is None else ans.u


def recover_low_order_jet(oracle: Oracle, a, cfg: LocalConfig, rng: np.random.Generator | None = None):
    """``P^(<c)(a)`` from a single random line through ``a`` (``q`` queries);
    ``None`` if a line decode fails."""
    params = cfg.params
    rng = _rng(cfg, rng)
    q, m = params.q, params.m
    while True:
        b = rng.integers(0, q, size=m)
        if b.any():
            break
    B = b[None, :]
    symbols = query_lines(oracle, a, B)
    ls = multi_indices(m, cfg.c)
    table = decode_lines(params, B, symbols, ls, lambda w: _sub_half_distance(params, w))
    out = []
    for li in range(len(ls)):
        v = table.v(0, 0, li)
        if v is None:
            return None
        out.append(v)
    return np.array(out, dtype=np.int64)


def m_line_order(c: int, m: int, s: int) -> int:
    """Number of jet weights recovered from ``m`` lines: all ``j' < c m/(m-1)``."""
    cp = Fraction(c * m, m - 1)
    return min(math.ceil(cp), s)


def m_line_correct(oracle: Oracle, a, cfg: LocalConfig, rng: np.random.Generator | None = None):
    """Jet ``P^(i)(a)`` for ``wt(i) < min(c m/(m-1), s)`` (rounded up) from ``m``
    lines in independent directions; ``m q`` queries, ``None`` on failure."""
    params = cfg.params
    q, m, s = params.q, params.m, params.s
    if m < 2:
        raise ValueError("the m-line corrector needs m >= 2")
    rng = _rng(cfg, rng)
    F = params.field
    while True:
        B = rng.integers(0, q, size=(m, m))
        if linalg.rank(F, B) == m:
            break
    symbols = query_lines(oracle, a, B)
    ls = multi_indices(m, cfg.c)
    table = decode_lines(params, B, symbols, ls, lambda w: _sub_half_distance(params, w))
    V, ok = table.values(s)
    if not ok.all():
        return None
    Bpow = direction_powers(q, B, s)
    R = []
    for jp in range(m_line_order(cfg.c, m, s)):
        lsel = [li for li, l in enumerate(ls) if sum(l) <= jp]
        A = constraint_matrix(q, m, jp, [ls[li] for li in lsel], Bpow, s)
        rhs = np.stack([V[:, li, jp - sum(ls[li])] for li in lsel], axis=1)
        try:
            R.append(linalg.solve(F, A.reshape(-1, A.shape[2]), rhs.reshape(-1)))
        except SingularSystem:
            return None
    return JetAnswer.from_pieces(R).u


# ---------------------------------------------------------------------------
# constant-query scheme
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SchemePreset:
    """Parameters of the large-alphabet scheme: ``delta = 1/2``,
    ``delta0 = 1/100`` and ``d = s q / 2``; messages are maps from points to
    jets of weight ``< c``."""

    q: int
    m: int
    s: int
    c: int
    delta0: Fraction = Fraction(1, 100)

    def __post_init__(self):
        if (self.s * self.q) % 2:
            raise ValueError("s*q must be even so that d = sq/2")
        if not 1 <= self.c <= self.s or self.c > self.q:
            raise ValueError("need 1 <= c <= min(s, q)")
        if (self.c + self.m) * self.q >= self.d:
            raise ValueError("need (c+m)q < d")

    @property
    def d(self) -> int:
        return self.s * self.q // 2

    @property
    def params(self) -> CodeParams:
        return CodeParams(self.q, self.m, self.s, self.d)

    @property
    def small_len(self) -> int:
        return math.comb(self.m + self.c - 1, self.m)

    def alphabet_ratio(self) -> Fraction:
        """``log|Sigma| / log|Sigma_0|``."""
        return Fraction(self.params.sym_len, self.small_len)

    def config(self, seed: int = 0) -> LocalConfig:
        return LocalConfig.build(self.params, self.delta0, seed=seed, c=self.c)


def _hasse_axis_matrices(q: int, orders: int) -> list[np.ndarray]:
    """``D_t[x, e] = C(e, t) x^(e-t)`` for ``t < orders`` and ``e < q``."""
    xs = np.arange(q, dtype=np.int64)
    pw = np.ones((q, q), dtype=np.int64)
    for e in range(1, q):
        pw[:, e] = pw[:, e - 1] * xs % q
    mats = []
    for t in range(orders):
        D = np.zeros((q, q), dtype=np.int64)
        for e in range(t, q):
            D[:, e] = binom_mod(e, t, q) * pw[:, e - t] % q
        mats.append(D)
    return mats


def _apply_axes(T: np.ndarray, mats, q: int) -> np.ndarray:
    for j, M in enumerate(mats):
        T = np.moveaxis(np.tensordot(M, T, axes=([1], [j])) % q, 0, j)
    return T


def scheme_interpolate(preset: SchemePreset, f: np.ndarray) -> MVPoly:
    """A polynomial of degree ``< (c+m) q`` with ``P^(<c)(a) = f(a)`` at
    every point.

    ``P`` is sought as ``sum_k (X^q - X)^k A_k`` over ``wt(k) < c`` with
    every ``A_k`` of degree ``< q`` in each variable.  At any point the
    ``l``-th derivative of ``(X^q - X)^k`` is ``(-1)^wt(k)`` when ``l = k``
    and zero for the other ``l`` of weight ``< c``, so the conditions are
    triangular in ``k`` and each ``A_k`` is one grid interpolation.
    """
    q, m, c = preset.q, preset.m, preset.c
    F = prime_field(q)
    idx = multi_indices(m, c)
    f = np.asarray(f, dtype=np.int64)
    if f.shape != (q ** m, len(idx)):
        raise ValueError("message must have shape %r" % ((q ** m, len(idx)),))
    D = _hasse_axis_matrices(q, c)
    Vinv = linalg.inverse(F, D[0])
    grid = (q,) * m
    A = {}
    for col, i in enumerate(idx):
        acc = f[:, col].reshape(grid)
        for k, Ck in A.items():
            if k == i or any(x > y for x, y in zip(k, i)):
                continue
            t = tuple(y - x for x, y in zip(k, i))
            val = _apply_axes(Ck, [D[tj] for tj in t], q)
            sign = -1 if sum(k) % 2 else 1
            acc = (acc - sign * val) % q
        if sum(i) % 2:
            acc = (-acc) % q
        A[i] = _apply_axes(acc, [Vinv] * m, q)
    size = c * q
    P = np.zeros((size,) * m, dtype=np.int64)
    for k, Ck in A.items():
        T = Ck
        for j, kj in enumerate(k):
            T = _times_vanishing(T, kj, j, q)
        sl = tuple(slice(0, n) for n in T.shape)
        P[sl] = (P[sl] + T) % q
    terms = {tuple(int(x) for x in e): int(P[tuple(e)]) for e in np.argwhere(P)}
    poly = MVPoly(F, m, terms)
    assert poly.degree() < (c + m) * q
    return poly


def _times_vanishing(T: np.ndarray, k: int, axis: int, q: int) -> np.ndarray:
    """Multiply by ``(X_axis^q - X_axis)^k``."""
    for _ in range(k):
        shape = list(T.shape)
        shape[axis] += q
        out = np.zeros(shape, dtype=np.int64)
        n = T.shape[axis]
        hi = [slice(None)] * T.ndim
        lo = [slice(None)] * T.ndim
        hi[axis] = slice(q, q + n)
        lo[axis] = slice(1, 1 + n)
        out[tuple(hi)] += T
        out[tuple(lo)] -= T
        T = out % q
    return T


def scheme_encode(preset: SchemePreset, f: np.ndarray) -> Codeword:
    """Encode a message ``f`` (rows in point order, jets of weight ``< c``)."""
    P = scheme_interpolate(preset, f)
    cw = encode(preset.params, P)
    if not np.array_equal(cw.symbols[:, :preset.small_len], np.asarray(f) % preset.q):
        raise ArithmeticError("scheme interpolation does not reproduce the message")
    return cw


def scheme_query(oracle: Oracle, a, preset: SchemePreset, rng: np.random.Generator | None = None):
    """``f(a)`` from ``q`` queries, or ``None``."""
    return recover_low_order_jet(oracle, a, preset.config(), rng)


def random_points(q: int, m: int, k: int, rng: np.random.Generator) -> np.ndarray:
    pts = all_points(q, m)
    return pts[rng.integers(0, len(pts), size=k)]

"""Interpolating sets, systematic encoding and local decoding of message
symbols.

An interpolating set is a list of ``binom(d+m, m)`` pairs ``(a, i)`` such
that a polynomial of degree ``<= d`` is determined by its values
``P^(i)(a)`` on the pairs.  Placing the message on those coordinates makes
the code systematic, so local correction of the coordinate's symbol decodes
the message entry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels, linalg
from .code import CodeParams, Codeword, _jet_tables, all_points, encode, point_index
from .localdec import LocalConfig, Oracle, correct_at
from .poly import MVPoly, monomials, multi_indices

# the exact greedy scan is used up to this many unknowns under ``method="auto"``
GREEDY_LIMIT = 2500
_CHUNK_ROWS = 512


class ConstructionError(RuntimeError):
    pass


@dataclass(frozen=True)
class InterpolatingSet:
    params: CodeParams
    pairs: tuple  # ((point, exp), ...) in selection order

    def __post_init__(self):
        if len(self.pairs) != self.params.dim:
            raise ValueError("an interpolating set has exactly binom(d+m, m) = %d pairs" % self.params.dim)

    def __len__(self):
        return len(self.pairs)

    def locate(self, idx: int) -> tuple[tuple, tuple]:
        """Message index -> ``(point, multi-index)``."""
        if not 0 <= idx < len(self.pairs):
            raise IndexError("message index %d out of range [0, %d)" % (idx, len(self.pairs)))
        return self.pairs[idx]

    def coordinates(self) -> tuple[np.ndarray, np.ndarray]:
        """Point indices and symbol positions of the pairs."""
        sym = {i: k for k, i in enumerate(multi_indices(self.params.m, self.params.s))}
        pts = np.array([point_index(a, self.params.q) for a, _ in self.pairs], dtype=np.int64)
        pos = np.array([sym[i] for _, i in self.pairs], dtype=np.int64)
        return pts, pos

    def read(self, cw: Codeword) -> np.ndarray:
        pts, pos = self.coordinates()
        return cw.symbols[pts, pos]

    def to_json(self) -> str:
        return json.dumps({"pairs": [{"point": list(a), "exp": list(i)} for a, i in self.pairs]})

    @classmethod
    def from_json(cls, params: CodeParams, text: str) -> "InterpolatingSet":
        obj = json.loads(text)
        pairs = []
        for item in obj["pairs"]:
            a = tuple(int(x) for x in item["point"])
            i = tuple(int(x) for x in item["exp"])
            if len(a) != params.m or len(i) != params.m:
                raise ValueError("pair %r does not match m = %d" % (item, params.m))
            if any(not 0 <= x < params.q for x in a) or any(x < 0 for x in i) or sum(i) >= params.s:
                raise ValueError("pair %r out of range" % (item,))
            pairs.append((a, i))
        return cls(params, tuple(pairs))


def evaluation_rows(params: CodeParams, points: np.ndarray) -> np.ndarray:
    """Rows ``(a, i)`` for the given points (all ``wt(i) < s``, graded-lex),
    as a ``(len(points) * sym_len, dim)`` matrix over monomials of degree
    ``<= d``."""
    q, m, d = params.q, params.m, params.d
    points = np.asarray(points, dtype=np.int64).reshape(-1, m)
    mons = np.array(monomials(m, d), dtype=np.int64).reshape(-1, m)
    pw = np.ones((len(points), m, d + 1), dtype=np.int64)
    for k in range(1, d + 1):
        pw[:, :, k] = pw[:, :, k - 1] * points % q
    V = np.ones((len(points), len(mons)), dtype=np.int64)
    for j in range(m):
        V = V * pw[:, j, :][:, mons[:, j]] % q
    tables = _jet_tables(q, m, params.s, d)
    out = np.zeros((len(points), len(tables), len(mons)), dtype=np.int64)
    for k, (src, dst, w) in enumerate(tables):
        out[:, k, src] = V[:, dst] * w % q
    return out.reshape(-1, len(mons))


def pair_matrix(params: CodeParams, pairs) -> np.ndarray:
    """Evaluation matrix with one row per pair."""
    sym = {i: k for k, i in enumerate(multi_indices(params.m, params.s))}
    rows = []
    for a, i in pairs:
        rows.append(evaluation_rows(params, np.array([a]))[sym[tuple(i)]])
    return np.array(rows, dtype=np.int64).reshape(len(rows), params.dim)


def _greedy_pairs(params: CodeParams, backend=None) -> list:
    pts = all_points(params.q, params.m)
    idx = multi_indices(params.m, params.s)
    per = max(1, _CHUNK_ROWS // len(idx))

    def chunks():
        for lo in range(0, len(pts), per):
            yield evaluation_rows(params, pts[lo:lo + per])

    rows = _kernels.greedy_rows(chunks(), params.dim, params.q, params.dim, backend=backend)
    if len(rows) != params.dim:
        raise ConstructionError("rank %d < %d: no interpolating set" % (len(rows), params.dim))
    return [(tuple(int(x) for x in pts[r // len(idx)]), idx[r % len(idx)]) for r in rows]


@lru_cache(maxsize=256)
def _block_or_greedy(q: int, m: int, s: int, d: int) -> tuple:
    try:
        return tuple(_triangular_pairs(q, m, s, d))
    except ConstructionError:
        return tuple(_greedy_pairs(CodeParams(q, m, s, d)))


def _triangular_pairs(q: int, m: int, s: int, d: int) -> list:
    """Interpolating pairs built one ``X_1``-order block at a time.

    Write ``P = sum_k B_k(X_1) D_k(X_2..X_m)`` where ``B_k`` is the product
    of the first ``k`` nodes of the sequence ``0^mu_0 1^mu_1 ...``.  The
    block ``k = (L, i1)`` (node ``L``, ``i1``-th repeat) gets the pairs
    ``((L, a'), (i1, i'))`` for an interpolating set ``(a', i')`` of order
    ``s - i1`` and degree ``d - k`` in ``m - 1`` variables.  A row of block
    ``k`` meets only blocks ``<= k`` and meets block ``k`` through an
    invertible matrix, so the full matrix is block triangular.  ``mu_L`` is
    the largest multiplicity for which every block stays solvable.  Any
    interpolating set works inside a block, so a block where this
    construction gets stuck falls back to the greedy scan.
    """
    if d < 0:
        return []
    if m == 1:
        out = []
        for a in range(q):
            for i in range(s):
                if len(out) == d + 1:
                    return out
                out.append(((a,), (i,)))
        if len(out) != d + 1:
            raise ConstructionError("need d < s*q")
        return out
    pairs = []
    k = 0
    L = 0
    while k <= d:
        if L >= q:
            raise ConstructionError("block construction ran out of X_1 nodes for (q, m, s, d) = %r" % ((q, m, s, d),))
        used = 0
        for i1 in range(s):
            kk = k + i1
            if kk > d or d - kk >= (s - i1) * q:
                break
            for a, i in _block_or_greedy(q, m - 1, s - i1, d - kk):
                pairs.append(((L,) + a, (i1,) + i))
            used += 1
        k += used
        L += 1
    return pairs


def build_interpolating_set(params: CodeParams, method: str = "auto", backend=None) -> InterpolatingSet:
    """An interpolating set for ``params``.

    ``method="greedy"`` scans the pairs in (point, graded-lex) order and
    keeps each one whose evaluation row raises the rank.  ``method="block"``
    uses the block-triangular construction, which only eliminates inside
    blocks where it falls back to the greedy scan.  ``"auto"`` picks the
    greedy scan up to ``GREEDY_LIMIT`` unknowns and the block construction
    beyond (greedy again if that gets stuck).
    """
    if params.dim > params.n * params.sym_len:
        raise ConstructionError("binom(d+m, m) exceeds the number of pairs")
    if method == "auto":
        method = "greedy"
        if params.dim > GREEDY_LIMIT:
            try:
                return InterpolatingSet(params, tuple(_triangular_pairs(params.q, params.m, params.s, params.d)))
            except ConstructionError:
                pass
    if method == "greedy":
        pairs = _greedy_pairs(params, backend)
    elif method == "block":
        pairs = _triangular_pairs(params.q, params.m, params.s, params.d)
    else:
        raise ValueError("unknown method %r" % method)
    assert len(pairs) == params.dim
    return InterpolatingSet(params, tuple(pairs))


@lru_cache(maxsize=8)
def _solver(iset: InterpolatingSet) -> np.ndarray:
    return linalg.inverse(iset.params.field, pair_matrix(iset.params, iset.pairs))


def is_interpolating(params: CodeParams, pairs) -> bool:
    return len(pairs) == params.dim and linalg.rank(params.field, pair_matrix(params, pairs)) == params.dim


def interpolate_from_set(iset: InterpolatingSet, values) -> MVPoly:
    """The unique ``P`` of degree ``<= d`` with ``P^(i)(a)`` equal to
    ``values`` on the pairs."""
    values = np.asarray(values, dtype=np.int64)
    if values.shape != (len(iset),):
        raise ValueError("need %d values, got shape %r" % (len(iset), values.shape))
    p = iset.params
    coeffs = linalg.matmul(p.field, _solver(iset), values % p.q)
    return MVPoly.from_coeff_vector(p.field, p.m, p.d, coeffs)


def systematic_encode(iset: InterpolatingSet, message) -> Codeword:
    """Codeword whose coordinates on the set spell out ``message``."""
    P = interpolate_from_set(iset, message)
    return encode(iset.params, P)


def local_decode_message(oracle: Oracle, iset: InterpolatingSet, idx: int, cfg: LocalConfig, rng=None):
    """Message entry ``idx`` by local correction of its coordinate; ``None``
    if the corrector fails."""
    a, i = iset.locate(idx)
    u = correct_at(oracle, np.array(a, dtype=np.int64), cfg, rng)
    if u is None:
        return None
    pos = multi_indices(iset.params.m, iset.params.s).index(tuple(i))
    return int(u[pos])

"""Unique decoding of univariate multiplicity codes (Berlekamp-Welch style)
and a brute-force list-decoding oracle.

A univariate code here is evaluated at *every* element of its field, which
may be a prime field or an extension field; the global decoder runs the same
routine over F_{q^m}.  A received word is an ``(n, s)`` array whose row ``x``
holds the claimed values ``r^(0)(x), ..., r^(s-1)(x)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import linalg
from .code import CodeParams, Codeword, monomial_matrix, jet_coefficients
from .poly import MVPoly, UVPoly, binom_mod, monomials, poly_divmod

ENUM_LIMIT_BITS = 24


class InstanceTooLarge(ValueError):
    pass


@dataclass
class ReceivedWordUV:
    """Received word of the order-``s``, degree-``d`` univariate code over
    ``field``; ``values[x, k]`` is ``r^(k)(x)``."""

    field: object
    s: int
    d: int
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.int64)
        if self.values.shape != (self.field.order, self.s):
            raise ValueError("received word has shape %r, expected %r" % (self.values.shape, (self.field.order, self.s)))
        if self.d >= self.s * self.field.order:
            raise ValueError("need d < s*n")

    @classmethod
    def from_codeword(cls, cw: Codeword) -> "ReceivedWordUV":
        if cw.params.m != 1:
            raise ValueError("univariate decoding needs m = 1")
        return cls(cw.params.field, cw.params.s, cw.params.d, cw.symbols)

    @property
    def n(self) -> int:
        return self.field.order

    @property
    def delta(self) -> Fraction:
        return 1 - Fraction(self.d, self.s * self.n)


@lru_cache(maxsize=64)
def hasse_eval_matrix(F, s: int, ncols: int) -> np.ndarray:
    """``H[x*s + k, j] = C(j, k) x^(j-k)``: maps coefficients to jets at
    every field element."""
    n = F.order
    xs = np.arange(n, dtype=np.int64)
    pw = np.zeros((n, ncols), dtype=np.int64)
    pw[:, 0] = 1
    for j in range(1, ncols):
        pw[:, j] = F.mul(pw[:, j - 1], xs)
    H = np.zeros((n, s, ncols), dtype=np.int64)
    for k in range(s):
        for j in range(k, ncols):
            b = binom_mod(j, k, F.p)
            if b:
                H[:, k, j] = F.mul(pw[:, j - k], np.full(n, F.from_int(b), dtype=np.int64))
    return H.reshape(n * s, ncols)


@lru_cache(maxsize=16)
def hermite_inverse(F, s: int) -> np.ndarray:
    """Inverse of the square jet-evaluation matrix (Hermite interpolation)."""
    return linalg.inverse(F, hasse_eval_matrix(F, s, s * F.order))


@lru_cache(maxsize=16)
def _vanishing_power(F, s: int) -> np.ndarray:
    """Coefficients of ``(X^n - X)^s``, length ``s*n + 1``."""
    n = F.order
    base = np.zeros(n + 1, dtype=np.int64)
    base[n] = 1
    base[1] = F.neg(1)
    out = np.array([1], dtype=np.int64)
    for _ in range(s):
        out = _pmul(F, out, base)
    return out


def _pmul(F, a, b):
    out = np.zeros(len(a) + len(b) - 1, dtype=np.int64)
    for k, c in enumerate(a):
        if c:
            out[k:k + len(b)] = F.add(out[k:k + len(b)], F.mul(np.full(len(b), int(c), dtype=np.int64), b))
    return out


def uv_jets(F, coeffs, s: int) -> np.ndarray:
    """Order-``s`` evaluation of a univariate polynomial at every element,
    shape ``(n, s)``."""
    coeffs = np.asarray(coeffs, dtype=np.int64)
    if coeffs.size == 0:
        return np.zeros((F.order, s), dtype=np.int64)
    H = hasse_eval_matrix(F, s, len(coeffs))
    return linalg.matmul(F, H, coeffs).reshape(F.order, s)


def uv_distance(F, coeffs, word: np.ndarray) -> Fraction:
    enc = uv_jets(F, coeffs, word.shape[1])
    return Fraction(int(np.any(enc != word, axis=1).sum()), F.order)


def interpolate(F, values: np.ndarray) -> np.ndarray:
    """The unique polynomial of degree ``< s*n`` with the given jets."""
    s = values.shape[1]
    return linalg.matmul(F, hermite_inverse(F, s), values.reshape(-1))


def _finish(word: ReceivedWordUV, E: np.ndarray, N: np.ndarray, radius: Fraction):
    F = word.field
    E = np.trim_zeros(E, "b")
    if E.size == 0:
        return None
    quot, rem = poly_divmod(F, N, E)
    if rem.size:
        return None
    if len(quot) - 1 > word.d:
        return None
    if uv_distance(F, quot, word.values) >= radius:
        return None
    return UVPoly(F, quot.tolist())


def unique_decode_uv(word: ReceivedWordUV, radius: Fraction | None = None, method: str = "reduced"):
    """Decode to the unique polynomial within ``radius`` (default: half the
    minimum distance) of ``word``; returns ``None`` on failure.

    ``method="direct"`` solves the full homogeneous system in the unknown
    coefficients of the error locator ``E`` (degree ``<= e``) and of
    ``N = E P`` (degree ``<= e + d``), one equation per ``(x, k)``.
    ``method="reduced"`` eliminates ``N`` first: with ``R`` the Hermite
    interpolant of the word, ``N`` must equal ``E R mod (X^n - X)^s``, which
    leaves about ``e`` equations in ``E`` alone.  Both solve the same system,
    and the result is re-encoded and checked against ``radius`` either way.
    """
    if radius is None:
        radius = word.delta / 2
    radius = Fraction(radius)
    if radius <= 0:
        return None
    if method == "reduced":
        return _decode_reduced(word, radius)
    if method == "direct":
        return _decode_direct(word, radius)
    raise ValueError("unknown method %r" % method)


def _degree_caps(word: ReceivedWordUV) -> int:
    return (word.s * word.n - word.d) // 2


def error_locator(word: ReceivedWordUV) -> tuple[np.ndarray, np.ndarray]:
    """A nonzero solution ``(E, N)`` of the key equations
    ``N^(k)(x) = sum_{i<=k} E^(i)(x) r^(k-i)(x)``, ``deg E <= e``,
    ``deg N <= e + d``, as coefficient arrays."""
    F, s, d, n = word.field, word.s, word.d, word.n
    e = _degree_caps(word)
    nE, nN = e + 1, e + d + 1
    assert nE + nN > s * n, "kernel must be nontrivial"
    H = hasse_eval_matrix(F, s, max(nE, nN)).reshape(n, s, -1)
    r = word.values
    A = np.zeros((n, s, nE + nN), dtype=np.int64)
    A[:, :, nE:] = H[:, :, :nN]
    for k in range(s):
        acc = np.zeros((n, nE), dtype=np.int64)
        for i in range(k + 1):
            acc = F.add(acc, F.mul(H[:, i, :nE], r[:, k - i][:, None]))
        A[:, k, :nE] = F.neg(acc)
    sol = linalg.nullspace_vector(F, A.reshape(n * s, -1))
    assert sol is not None
    return sol[:nE], sol[nE:]


def _decode_direct(word: ReceivedWordUV, radius: Fraction):
    E, N = error_locator(word)
    return _finish(word, E, N, radius)


def _decode_reduced(word: ReceivedWordUV, radius: Fraction, R: np.ndarray | None = None):
    F, s, d, n = word.field, word.s, word.d, word.n
    sn = s * n
    if R is None:
        R = interpolate(F, word.values)
    top = np.nonzero(R)[0]
    if top.size == 0 or top[-1] <= d:
        # the word is itself a codeword
        return _finish(word, np.array([1]), R, radius)
    e = _degree_caps(word)
    G = _vanishing_power(F, s)
    lowG = G[:sn]
    cur = R.copy()
    rows = np.zeros((e + 1, sn), dtype=np.int64)
    for k in range(e + 1):
        rows[k] = cur
        t = int(cur[-1])
        cur = np.concatenate([[0], cur[:-1]])
        if t:
            cur = F.sub(cur, F.mul(np.full(sn, t, dtype=np.int64), lowG))
    A = rows[:, e + d + 1:].T
    E = linalg.nullspace_vector(F, A) if A.shape[0] else _last_unit(e + 1)
    assert E is not None, "kernel must be nontrivial"
    N = linalg.matmul(F, rows.T, E)
    return _finish(word, E, N, radius)


def decode_many(F, words: np.ndarray, d: int, radius) -> list:
    """Decode a stack of received words ``(K, n, s)`` of one univariate
    code with the reduced method; returns coefficient arrays or ``None``.

    Hermite interpolation is done for the whole stack at once, and words
    that already are codewords skip the key-equation solve.
    """
    words = np.asarray(words, dtype=np.int64)
    K, n, s = words.shape
    radius = Fraction(radius)
    if radius <= 0:
        return [None] * K
    Rs = linalg.matmul(F, words.reshape(K, n * s), hermite_inverse(F, s).T)
    out = []
    for k in range(K):
        word = ReceivedWordUV(F, s, d, words[k])
        res = _decode_reduced(word, radius, Rs[k])
        out.append(None if res is None else np.array(res.coeffs, dtype=np.int64))
    return out


def _last_unit(k: int) -> np.ndarray:
    x = np.zeros(k, dtype=np.int64)
    x[-1] = 1
    return x


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------

def _check_enum(F_order: int, dim: int):
    if dim * math.log2(F_order) > ENUM_LIMIT_BITS:
        raise InstanceTooLarge("enumeration of %d^%d polynomials refused" % (F_order, dim))


def generator_matrix(params: CodeParams) -> np.ndarray:
    """``G[point*sym + k, mono]``: jets of each monomial, so that
    ``G @ coeffs`` is the flattened codeword."""
    V = monomial_matrix(params.q, params.m, params.d)
    F = params.field
    cols = []
    for e in monomials(params.m, params.d):
        J = jet_coefficients(MVPoly(F, params.m, {e: 1}), params)
        cols.append(linalg.matmul(F, V, J).reshape(-1))
    return np.stack(cols, axis=1)


def brute_force_list_decode(params: CodeParams, received, eta) -> list[MVPoly]:
    """All ``P`` with ``deg P <= d`` and ``Delta(Enc(P), r) < eta``, by full
    enumeration."""
    eta = Fraction(eta)
    F = params.field
    _check_enum(params.q, params.dim)
    if eta <= 0:
        return []
    r = received.symbols if isinstance(received, Codeword) else np.asarray(received, dtype=np.int64)
    G = generator_matrix(params)
    dim = params.dim
    out = []
    # agreements needed: n - errors, errors < eta * n
    chunk = 1 << 14
    total = params.q ** dim
    pw = params.q ** np.arange(dim, dtype=np.int64)
    for lo in range(0, total, chunk):
        codes = np.arange(lo, min(total, lo + chunk), dtype=np.int64)
        C = (codes[None, :] // pw[:, None]) % params.q  # dim x K
        words = linalg.matmul(F, G, C).reshape(params.n, params.sym_len, -1)
        errs = np.any(words != r[:, :, None], axis=1).sum(axis=0)
        for k in np.nonzero(errs * eta.denominator < eta.numerator * params.n)[0]:
            out.append(MVPoly.from_coeff_vector(F, params.m, params.d, C[:, k]))
    return out

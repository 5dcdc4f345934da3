"""Hot linear-algebra kernels over F_q and F_{q^m}.

Each kernel has a numba ``@njit`` implementation and a pure-numpy one with
identical results.  The numba path is used when numba imports and the
environment variable ``MULTCODE_NUMBA`` is not set to ``0``; the numpy path
is the reference and is exercised by the test suite on both settings.

Kernels take the field as a :class:`~multcode.gf.FieldSpec`: prime fields
use modular arithmetic directly, extension fields use exp/log tables for
multiplication and base-q digit arithmetic for addition.
"""

from __future__ import annotations

import os

import numpy as np

from .gf import FieldSpec

try:
    import numba
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False


def numba_enabled() -> bool:
    return _HAVE_NUMBA and os.environ.get("MULTCODE_NUMBA", "1") != "0"


# exact float64 accumulation bound for the BLAS path
_FLOAT_EXACT = float(2 ** 52)


def matmul_prime(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """``A @ B mod p`` through float64 BLAS, chunking the inner dimension so
    every partial sum stays exactly representable."""
    A = np.asarray(A, dtype=np.int64) % p
    B = np.asarray(B, dtype=np.int64) % p
    if (p - 1) ** 2 <= _FLOAT_EXACT:
        return _matmul_bounded(A, B, p, p - 1)
    if p >= 2 ** 36:
        return (A.astype(object) @ B.astype(object) % p).astype(np.int64)
    # large p: split A into 16-bit limbs so each product stays below 2^52
    hi = _matmul_bounded(A >> 16, B, p, (p - 1) >> 16)
    lo = _matmul_bounded(A & 0xFFFF, B, p, 0xFFFF)
    return (hi * (2 ** 16 % p) % p + lo) % p


def _matmul_bounded(A, B, p, amax):
    k = A.shape[-1]
    step = max(1, int(_FLOAT_EXACT // ((amax * (p - 1)) or 1)))
    if step >= k:
        return np.rint(A.astype(np.float64) @ B.astype(np.float64)).astype(np.int64) % p
    out = np.zeros(A.shape[:-1] + B.shape[1:], dtype=np.int64)
    for lo in range(0, k, step):
        part = A[..., lo:lo + step].astype(np.float64) @ B[lo:lo + step].astype(np.float64)
        out = (out + np.rint(part).astype(np.int64)) % p
    return out


# ---------------------------------------------------------------------------
# numpy reference implementations
# ---------------------------------------------------------------------------

def _np_digits(x, spec: FieldSpec):
    pw = spec.p ** np.arange(spec.m, dtype=np.int64)
    return (np.asarray(x, dtype=np.int64)[..., None] // pw) % spec.p, pw


def _np_add(a, b, spec: FieldSpec, sign: int = 1):
    if spec.m == 1:
        return (a + sign * b) % spec.p
    da, pw = _np_digits(a, spec)
    db, _ = _np_digits(b, spec)
    return ((da + sign * db) % spec.p) @ pw


def _np_mul(a, b, spec: FieldSpec):
    if spec.m == 1:
        return (a * b) % spec.p
    a = np.asarray(a, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    out = spec.exp[spec.log[a] + spec.log[b]]
    return np.where((a == 0) | (b == 0), 0, out)


def _np_inv(a: int, spec: FieldSpec) -> int:
    if spec.m == 1:
        return pow(int(a), -1, spec.p)
    n = spec.order - 1
    return int(spec.exp[(n - spec.log[a]) % n])


def _np_rref(A: np.ndarray, spec: FieldSpec, ncols: int):
    A = A.copy()
    rows = A.shape[0]
    pivots = []
    r = 0
    for c in range(ncols):
        if r == rows:
            break
        nz = np.nonzero(A[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            A[[r, i]] = A[[i, r]]
        inv = _np_inv(A[r, c], spec)
        A[r] = _np_mul(A[r], inv, spec)
        col = A[:, c].copy()
        col[r] = 0
        hit = np.nonzero(col)[0]
        if hit.size:
            A[hit] = _np_add(A[hit], _np_mul(col[hit, None], A[r][None, :], spec), spec, -1)
        pivots.append(c)
        r += 1
    return A, np.array(pivots, dtype=np.int64)


def _np_matmul_ext(A, B, spec: FieldSpec):
    n, k = A.shape
    r = B.shape[1]
    out_dig = np.zeros((n, r, spec.m), dtype=np.int64)
    pw = spec.p ** np.arange(spec.m, dtype=np.int64)
    chunk = max(1, 4_000_000 // max(1, n * r))
    for lo in range(0, k, chunk):
        prod = _np_mul(A[:, lo:lo + chunk, None], B[None, lo:lo + chunk, :], spec)
        dig = (prod[..., None] // pw) % spec.p
        out_dig = (out_dig + dig.sum(axis=1)) % spec.p
    return out_dig @ pw


# ---------------------------------------------------------------------------
# numba implementations
# ---------------------------------------------------------------------------

if _HAVE_NUMBA:

    @njit(cache=True)
    def _nb_add(a, b, p, m, sign):
        if m == 1:
            return (a + sign * b) % p
        r = 0
        w = 1
        for _ in range(m):
            r += ((a % p + sign * (b % p)) % p) * w
            a //= p
            b //= p
            w *= p
        return r

    @njit(cache=True)
    def _nb_mul(a, b, p, m, exp, log):
        if m == 1:
            return (a * b) % p
        if a == 0 or b == 0:
            return 0
        return exp[log[a] + log[b]]

    @njit(cache=True)
    def _nb_inv(a, p, m, order, exp, log):
        if m == 1:
            r0, r1 = p, a % p
            s0, s1 = 0, 1
            while r1 != 0:
                t = r0 // r1
                r0, r1 = r1, r0 - t * r1
                s0, s1 = s1, s0 - t * s1
            return s0 % p
        n = order - 1
        return exp[(n - log[a]) % n]

    @njit(cache=True)
    def _nb_rref(A, p, m, order, exp, log, ncols):
        rows = A.shape[0]
        width = A.shape[1]
        pivots = np.empty(min(rows, ncols), dtype=np.int64)
        r = 0
        for c in range(ncols):
            if r == rows:
                break
            piv = -1
            for i in range(r, rows):
                if A[i, c] != 0:
                    piv = i
                    break
            if piv < 0:
                continue
            if piv != r:
                for k in range(width):
                    t = A[r, k]
                    A[r, k] = A[piv, k]
                    A[piv, k] = t
            inv = _nb_inv(A[r, c], p, m, order, exp, log)
            for k in range(c, width):
                A[r, k] = _nb_mul(A[r, k], inv, p, m, exp, log)
            for i in range(rows):
                if i == r:
                    continue
                f = A[i, c]
                if f == 0:
                    continue
                if m == 1:
                    for k in range(c, width):
                        A[i, k] = (A[i, k] - f * A[r, k]) % p
                else:
                    for k in range(c, width):
                        if A[r, k] != 0:
                            A[i, k] = _nb_add(A[i, k], _nb_mul(f, A[r, k], p, m, exp, log), p, m, -1)
            pivots[r] = c
            r += 1
        return pivots[:r]

    @njit(cache=True)
    def _nb_matmul_ext(A, B, p, m, exp, log):
        n, k = A.shape
        r = B.shape[1]
        out = np.zeros((n, r), dtype=np.int64)
        dig = np.zeros(m, dtype=np.int64)
        for i in range(n):
            for j in range(r):
                dig[:] = 0
                for t in range(k):
                    a = A[i, t]
                    b = B[t, j]
                    if a == 0 or b == 0:
                        continue
                    x = exp[log[a] + log[b]]
                    for d in range(m):
                        dig[d] += x % p
                        x //= p
                acc = 0
                w = 1
                for d in range(m):
                    acc += (dig[d] % p) * w
                    w *= p
                out[i, j] = acc
        return out


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def rref(A: np.ndarray, spec: FieldSpec, ncols: int | None = None, backend: str | None = None):
    """Reduced row echelon form of ``A`` (copied) over the field.

    Only the first ``ncols`` columns are used for pivoting (the rest ride
    along, e.g. an augmented right-hand side).  Returns ``(R, pivots)``.
    """
    A = np.array(A, dtype=np.int64, copy=True)
    if A.ndim != 2:
        raise ValueError("rref expects a matrix")
    if ncols is None:
        ncols = A.shape[1]
    if _pick(backend) == "numba":
        piv = _nb_rref(A, spec.p, spec.m, spec.order, spec.exp, spec.log, ncols)
        return A, piv
    return _np_rref(A, spec, ncols)


def matmul(A: np.ndarray, B: np.ndarray, spec: FieldSpec, backend: str | None = None) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    vec = B.ndim == 1
    if vec:
        B = B[:, None]
    if spec.m == 1:
        out = matmul_prime(A, B, spec.p)
    elif _pick(backend) == "numba":
        out = _nb_matmul_ext(np.ascontiguousarray(A), np.ascontiguousarray(B), spec.p, spec.m, spec.exp, spec.log)
    else:
        out = _np_matmul_ext(A, B, spec)
    return out[:, 0] if vec else out


def _pick(backend: str | None) -> str:
    if backend is None:
        return "numba" if numba_enabled() else "numpy"
    if backend == "numba" and not _HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


# ---------------------------------------------------------------------------
# greedy row selection (prime fields)
# ---------------------------------------------------------------------------

def _np_chunk_echelon(C: np.ndarray, p: int):
    """Scan the rows of ``C`` in order, keeping those independent of the
    earlier kept ones; returns ``(picked, pivots, K)`` with ``K`` in reduced
    echelon form."""
    picked, pivots, rows = [], [], []
    for i in range(C.shape[0]):
        row = C[i].copy()
        if rows:
            K = np.array(rows)
            row = (row - row[pivots] @ K) % p
        nz = np.nonzero(row)[0]
        if nz.size == 0:
            continue
        c = int(nz[0])
        row = row * pow(int(row[c]), -1, p) % p
        for k in range(len(rows)):
            f = rows[k][c]
            if f:
                rows[k] = (rows[k] - f * row) % p
        picked.append(i)
        pivots.append(c)
        rows.append(row)
    K = np.array(rows, dtype=np.int64).reshape(len(rows), C.shape[1])
    return np.array(picked, dtype=np.int64), np.array(pivots, dtype=np.int64), K


if _HAVE_NUMBA:

    @njit(cache=True)
    def _nb_chunk_echelon(C, p):
        k, n = C.shape
        K = np.zeros((k, n), dtype=np.int64)
        picked = np.empty(k, dtype=np.int64)
        pivots = np.empty(k, dtype=np.int64)
        r = 0
        row = np.empty(n, dtype=np.int64)
        for i in range(k):
            for t in range(n):
                row[t] = C[i, t]
            for j in range(r):
                f = row[pivots[j]]
                if f != 0:
                    for t in range(n):
                        row[t] = (row[t] - f * K[j, t]) % p
            c = -1
            for t in range(n):
                if row[t] != 0:
                    c = t
                    break
            if c < 0:
                continue
            inv = _nb_inv(row[c], p, 1, p, np.zeros(1, dtype=np.int64), np.zeros(1, dtype=np.int64))
            for t in range(n):
                row[t] = row[t] * inv % p
            for j in range(r):
                f = K[j, c]
                if f != 0:
                    for t in range(n):
                        K[j, t] = (K[j, t] - f * row[t]) % p
            for t in range(n):
                K[r, t] = row[t]
            picked[r] = i
            pivots[r] = c
            r += 1
        return picked[:r], pivots[:r], K[:r]


def greedy_rows(chunks, ncols: int, p: int, target: int, backend: str | None = None) -> list[int]:
    """Global indices of the rows that raise the rank, scanning the row
    blocks of ``chunks`` in order and stopping once the rank is ``target``.

    Each block is first reduced against the basis found so far with one
    BLAS product, then scanned row by row.
    """
    E = np.zeros((0, ncols), dtype=np.int64)
    piv = np.zeros(0, dtype=np.int64)
    chosen: list[int] = []
    offset = 0
    use_nb = _pick(backend) == "numba"
    for C in chunks:
        C = np.asarray(C, dtype=np.int64) % p
        if len(piv):
            C = (C - matmul_prime(C[:, piv], E, p)) % p
        if use_nb:
            picked, newpiv, K = _nb_chunk_echelon(np.ascontiguousarray(C), p)
        else:
            picked, newpiv, K = _np_chunk_echelon(C, p)
        need = target - len(chosen)
        if len(picked) > need:
            # the kept rows are not needed beyond full rank
            picked, newpiv, K = picked[:need], newpiv[:need], K[:need]
        if len(picked):
            if len(piv):
                E = (E - matmul_prime(E[:, newpiv], K, p)) % p
            E = np.concatenate([E, K])
            piv = np.concatenate([piv, newpiv])
            chosen.extend((offset + picked).tolist())
        offset += C.shape[0]
        if len(chosen) >= target:
            break
    return chosen

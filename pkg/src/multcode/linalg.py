"""Exact linear algebra over a finite field (wrappers around the kernels)."""

from __future__ import annotations

import numpy as np

from . import _kernels
from .gf import FieldError


class SingularSystem(FieldError):
    """A linear system has no solution or no unique solution."""


def rank(F, A) -> int:
    A = np.asarray(A, dtype=np.int64)
    if A.size == 0:
        return 0
    return len(_kernels.rref(A, F.spec)[1])


def nullspace_vector(F, A) -> np.ndarray | None:
    """A nonzero kernel vector of ``A``, or ``None`` if the kernel is trivial.

    The last free variable is set to 1 and all others to 0, which makes the
    choice deterministic.
    """
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[1]
    if A.shape[0] == 0:
        x = np.zeros(n, dtype=np.int64)
        x[-1] = 1
        return x
    R, piv = _kernels.rref(A, F.spec)
    free = sorted(set(range(n)) - set(piv.tolist()))
    if not free:
        return None
    f = free[-1]
    x = np.zeros(n, dtype=np.int64)
    x[f] = 1
    # pivot row i: x[piv[i]] + R[i, f] * x[f] = 0
    x[piv] = F.neg(R[: len(piv), f])
    return x


def solve(F, A, b, *, unique: bool = True) -> np.ndarray:
    """Solve ``A x = b``; raises :class:`SingularSystem` if inconsistent, or
    if ``unique`` and the solution is not unique."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64)
    n = A.shape[1]
    aug = np.concatenate([A, b.reshape(A.shape[0], -1)], axis=1)
    R, piv = _kernels.rref(aug, F.spec, ncols=n)
    r = len(piv)
    if np.any(R[r:, n:] != 0):
        raise SingularSystem("inconsistent linear system")
    if unique and r < n:
        raise SingularSystem("solution not unique (rank %d < %d)" % (r, n))
    x = np.zeros((n, aug.shape[1] - n), dtype=np.int64)
    x[piv] = R[:r, n:]
    return x[:, 0] if b.ndim == 1 else x


def inverse(F, A) -> np.ndarray:
    A = np.asarray(A, dtype=np.int64)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("square matrix required")
    return solve(F, A, np.eye(n, dtype=np.int64))


def independent_rows(F, A) -> list[int]:
    """Indices of a maximal set of linearly independent rows, chosen greedily
    in row order."""
    A = np.asarray(A, dtype=np.int64)
    _, piv = _kernels.rref(A.T, F.spec)
    return piv.tolist()


def matmul(F, A, B) -> np.ndarray:
    return _kernels.matmul(A, B, F.spec)

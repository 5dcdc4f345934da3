"""Seeded symbol-error channel."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .code import Codeword

MODES = ("exact", "bernoulli")


@dataclass(frozen=True)
class ChannelSpec:
    """Corrupt ``floor(rate * n)`` uniformly chosen coordinates (``"exact"``)
    or each coordinate independently with probability ``rate``
    (``"bernoulli"``).  A corrupted coordinate gets a uniformly random
    symbol different from the original one."""

    rate: Fraction
    seed: int = 0
    mode: str = "exact"

    def __post_init__(self):
        object.__setattr__(self, "rate", Fraction(self.rate))
        if not 0 <= self.rate < 1:
            raise ValueError("rate must lie in [0, 1)")
        if self.mode not in MODES:
            raise ValueError("mode must be one of %r" % (MODES,))

    def positions(self, n: int, rng: np.random.Generator) -> np.ndarray:
        if self.mode == "exact":
            k = math.floor(self.rate * n)
            return np.sort(rng.choice(n, size=k, replace=False))
        hits = rng.random(n) < float(self.rate)
        return np.nonzero(hits)[0]

    def apply(self, cw: Codeword, rng: np.random.Generator | None = None) -> tuple[Codeword, np.ndarray]:
        """Corrupted copy of ``cw`` and the corrupted coordinates."""
        if rng is None:
            rng = np.random.default_rng(self.seed)
        out = cw.copy()
        q, L = cw.params.q, cw.params.sym_len
        pos = self.positions(cw.params.n, rng)
        for x in pos:
            while True:
                sym = rng.integers(0, q, size=L)
                if not np.array_equal(sym, out.symbols[x]):
                    break
            out.symbols[x] = sym
        return out, pos


def corrupt(cw: Codeword, spec: ChannelSpec) -> Codeword:
    return spec.apply(cw)[0]

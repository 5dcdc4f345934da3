"""Seeded Monte-Carlo trials of the decoders."""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .channel import ChannelSpec
from .code import CodeParams, encode
from .globaldec import global_unique_decode
from .localdec import LocalConfig, Oracle, correct_at, m_line_correct, recover_low_order_jet
from .poly import MVPoly
from .unidec import ReceivedWordUV, unique_decode_uv

BENCH_MODES = ("unique", "global", "local", "line", "mline")

SUCCESS, FAILURE, WRONG = "success", "failure", "wrong"


@dataclass
class TrialReport:
    trials: int = 0
    successes: int = 0
    failures: int = 0
    wrong_answers: int = 0
    queries: list = field(default_factory=list)
    times_ms: list = field(default_factory=list)

    def add(self, outcome: str, queries: int, ms: float):
        self.trials += 1
        if outcome == SUCCESS:
            self.successes += 1
        elif outcome == FAILURE:
            self.failures += 1
        else:
            self.wrong_answers += 1
        self.queries.append(queries)
        self.times_ms.append(ms)

    @property
    def success_rate(self) -> float:
        return self.successes / self.trials if self.trials else 0.0

    def as_dict(self) -> dict:
        return {
            "trials": self.trials,
            "successes": self.successes,
            "failures": self.failures,
            "wrong_answers": self.wrong_answers,
            "success_rate": self.success_rate,
            "mean_queries": float(np.mean(self.queries)) if self.queries else 0.0,
            "mean_ms": float(np.mean(self.times_ms)) if self.times_ms else 0.0,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict())


def _judge(got, want) -> str:
    if got is None:
        return FAILURE
    return SUCCESS if got == want else WRONG


def run_trial(mode: str, params: CodeParams, rate, delta0, rng: np.random.Generator, channel_mode: str = "exact"):
    """One trial: random ``P``, corrupt ``Enc(P)``, decode.  Returns
    ``(outcome, queries)``."""
    P = MVPoly.random(params.field, params.m, params.d, rng)
    cw = encode(params, P)
    spec = ChannelSpec(Fraction(rate), mode=channel_mode)
    r, _ = spec.apply(cw, rng)
    if mode == "unique":
        res = unique_decode_uv(ReceivedWordUV.from_codeword(r))
        return _judge(None if res is None else res.to_mv(), P), params.n
    if mode == "global":
        return _judge(global_unique_decode(r, delta0), P), params.n
    cfg = LocalConfig.build(params, delta0)
    a = rng.integers(0, params.q, size=params.m)
    oracle = Oracle(r)
    if mode == "local":
        u = correct_at(oracle, a, cfg, rng)
    elif mode == "line":
        u = recover_low_order_jet(oracle, a, cfg, rng)
    elif mode == "mline":
        u = m_line_correct(oracle, a, cfg, rng)
    else:
        raise ValueError("unknown bench mode %r" % mode)
    want = cw.at(a)
    got = None if u is None else tuple(int(x) for x in u)
    return _judge(got, tuple(int(x) for x in want[: len(u)]) if u is not None else None), oracle.queries


def run_bench(mode: str, params: CodeParams, rate, trials: int, seed: int, delta0=None,
              channel_mode: str = "exact") -> TrialReport:
    """``trials`` independent trials; trial ``t`` uses seed ``seed ^ t``."""
    if mode not in BENCH_MODES:
        raise ValueError("mode must be one of %r" % (BENCH_MODES,))
    delta0 = Fraction(rate) if delta0 is None else Fraction(delta0)
    report = TrialReport()
    for t in range(trials):
        rng = np.random.default_rng(seed ^ t)
        t0 = time.perf_counter()
        outcome, queries = run_trial(mode, params, rate, delta0, rng, channel_mode)
        report.add(outcome, queries, (time.perf_counter() - t0) * 1000)
    return report

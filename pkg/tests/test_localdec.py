import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from multcode import linalg
from multcode.code import CodeParams, all_points, encode
from multcode.gf import prime_field
from multcode.localdec import (
    DirectionSet,
    LineTable,
    LocalConfig,
    Oracle,
    SchemePreset,
    constraint_matrix,
    correct_at,
    decode_lines,
    direction_powers,
    jet_combination_decode,
    line_words,
    m_line_correct,
    m_line_order,
    query_lines,
    recover_low_order_jet,
    scheme_encode,
    scheme_interpolate,
    scheme_query,
)
from multcode.poly import MVPoly, exact_weight, hasse_derivative, multi_indices, order_s_evaluation, restrict_to_line

SMALL = CodeParams(31, 2, 4, 12)


def setup(params, seed, errors=0):
    rng = np.random.default_rng(seed)
    P = MVPoly.random(params.field, params.m, params.d, rng)
    cw = encode(params, P)
    r = cw.copy()
    for x in rng.choice(params.n, size=errors, replace=False):
        r.symbols[x] = (r.symbols[x] + 1 + rng.integers(0, params.q - 1, size=params.sym_len)) % params.q
    return P, cw, r, rng


def test_config_derivation():
    cfg = LocalConfig.build(CodeParams(31, 2, 8, 124), Fraction(3, 100))
    assert cfg.gamma == Fraction(13, 38)
    assert cfg.c == 3 and len(cfg.S) == 14
    assert cfg.query_count == 14 ** 2 * 31 == 6076
    assert cfg.line_radius() == Fraction(12, 100)
    with pytest.raises(ValueError):
        LocalConfig.build(CodeParams(31, 2, 8, 124), Fraction(1, 16))


def test_direction_set_is_injective(rng):
    cfg = LocalConfig.build(SMALL, Fraction(1, 100))
    for _ in range(10):
        D = DirectionSet.draw(cfg, rng)
        assert len(np.unique(D.B, axis=0)) == len(cfg.S) ** 2
        S = np.array(cfg.S)
        alphas = np.array(list(itertools.product(S, repeat=2)))
        assert np.array_equal(np.sort((D.z + alphas @ D.ys) % 31, axis=0), np.sort(D.B, axis=0))


def test_direction_set_rejects_large_grid():
    cfg = LocalConfig.build(CodeParams(5, 2, 3, 1), Fraction(1, 100), c=1)
    assert len(cfg.S) == 15
    with pytest.raises(ValueError):
        DirectionSet.draw(cfg, np.random.default_rng(0))


def test_oracle_counts_queries():
    p = CodeParams(5, 2, 2, 3)
    cw = encode(p, MVPoly(p.field, 2, {(1, 1): 1}))
    o = Oracle(cw)
    assert np.array_equal(o((2, 3)), cw.at((2, 3)))
    o.batch(np.zeros((4, 7, 2), dtype=np.int64))
    assert o.queries == 29


@pytest.mark.parametrize("seed", range(5))
def test_uncorrupted_correction_is_exact(seed):
    P, cw, _, rng = setup(SMALL, seed)
    cfg = LocalConfig.build(SMALL, Fraction(1, 100), seed=seed)
    a = rng.integers(0, 31, size=2)
    o = Oracle(cw)
    u = correct_at(o, a, cfg)
    assert np.array_equal(u, order_s_evaluation(P, a, 4))
    assert o.queries == cfg.query_count == 25 * 31


@pytest.mark.parametrize("seed", range(10))
def test_correction_under_noise(seed):
    P, cw, r, rng = setup(SMALL, seed, errors=9)
    cfg = LocalConfig.build(SMALL, Fraction(1, 100))
    a = rng.integers(0, 31, size=2)
    u = correct_at(Oracle(r), a, cfg, rng)
    assert u is None or np.array_equal(u, cw.at(a))


def test_seeded_determinism():
    _, _, r, _ = setup(SMALL, 4, errors=9)
    cfg = LocalConfig.build(SMALL, Fraction(1, 100), seed=99)
    runs = [correct_at(Oracle(r), (3, 5), cfg) for _ in range(2)]
    assert np.array_equal(runs[0], runs[1])


def test_degenerate_order_one():
    # c = 1: step-4 systems only have l = 0; force it and compare with truth
    P, cw, r, rng = setup(SMALL, 2, errors=5)
    cfg = LocalConfig.build(SMALL, Fraction(1, 100), c=1)
    assert cfg.c == 1 and len(cfg.S) == 20
    for _ in range(3):
        a = rng.integers(0, 31, size=2)
        u = correct_at(Oracle(r), a, cfg, rng)
        assert np.array_equal(u, cw.at(a))


def test_good_line_identity():
    # fewer than 4*delta0*q errors on a line -> every Q_{b,l} is exact
    p = CodeParams(31, 2, 8, 124)
    delta0 = Fraction(3, 100)
    P, cw, _, rng = setup(p, 1)
    a, b = np.array([4, 9]), np.array([1, 7])
    pts = (a[None, :] + np.arange(31)[:, None] * b[None, :]) % 31
    r = cw.copy()
    bad = rng.choice(31, size=3, replace=False)  # 3 < 4 * 3/100 * 31 = 3.72
    idx = pts[bad] @ np.array([31, 1])
    r.symbols[idx] = (r.symbols[idx] + 1) % 31
    ls = multi_indices(2, 3)
    symbols = query_lines(Oracle(r), a, b[None, :])
    table = decode_lines(p, b[None, :], symbols, ls, lambda w: 4 * delta0)
    for li, l in enumerate(ls):
        want = restrict_to_line(hasse_derivative(P, l), a, b)
        got = table.coeffs[(0, li)]
        assert got is not None
        assert np.array_equal(np.trim_zeros(got, "b"), np.array(want.coeffs, dtype=np.int64))


def test_line_words_match_derivative_restrictions(rng):
    p = CodeParams(13, 2, 3, 10)
    P = MVPoly.random(p.field, 2, 10, rng)
    cw = encode(p, P)
    a = np.array([2, 5])
    B = np.array([[1, 3], [0, 1], [4, 4]])
    symbols = query_lines(Oracle(cw), a, B)
    for l in multi_indices(2, 2):
        W = line_words(p, B, symbols, l)
        for k, b in enumerate(B):
            Q = restrict_to_line(hasse_derivative(P, l), a, b)
            for t in range(13):
                assert W[k, t].tolist() == [Q.hasse(j)(t) for j in range(3 - sum(l))]


def test_jet_consistency_on_clean_lines(rng):
    P, cw, _, _ = setup(SMALL, 7)
    cfg = LocalConfig.build(SMALL, Fraction(1, 100))
    a = np.array([11, 30])
    D = DirectionSet.draw(cfg, rng)
    ls = multi_indices(2, cfg.c)
    symbols = query_lines(Oracle(cw), a, D.B)
    table = decode_lines(SMALL, D.B, symbols, ls, lambda w: cfg.line_radius())
    V, ok = table.values(4)
    assert ok.all()
    jet = order_s_evaluation(P, a, 4)
    Bpow = direction_powers(31, D.B, 4)
    pos = 0
    for jp in range(4):
        coef = jet[pos:pos + jp + 1]
        pos += jp + 1
        lsel = [li for li, l in enumerate(ls) if sum(l) <= jp]
        A = constraint_matrix(31, 2, jp, [ls[li] for li in lsel], Bpow, 4)
        rhs = np.stack([V[:, li, jp - sum(ls[li])] for li in lsel], axis=1)
        assert np.array_equal(A @ coef % 31, rhs)


@settings(max_examples=15)
@given(st.integers(0, 2 ** 32 - 1))
def test_plant_and_recover_with_garbage(seed):
    # 30% of directions carry garbage values; the consensus solve still finds R
    rng = np.random.default_rng(seed)
    q, m, s, c = 31, 2, 4, 2
    B = rng.choice(all_points(q, m)[1:], size=40, replace=False)
    ls = multi_indices(m, c)
    Bpow = direction_powers(q, B, s)
    R = [rng.integers(0, q, size=len(exact_weight(m, jp))) for jp in range(s)]
    table = LineTable(B, tuple(ls))
    V = np.zeros((len(B), len(ls), s), dtype=np.int64)
    for jp in range(s):
        for li, l in enumerate(ls):
            if sum(l) <= jp:
                A = constraint_matrix(q, m, jp, [l], Bpow, s)[:, 0, :]
                V[:, li, jp - sum(l)] = A @ R[jp] % q
    bad = rng.choice(len(B), size=12, replace=False)
    V[bad] = rng.integers(0, q, size=V[bad].shape)
    for k in range(len(B)):
        for li in range(len(ls)):
            table.coeffs[(k, li)] = V[k, li]
    ans = jet_combination_decode(table, c, s, q, rng)
    assert ans is not None
    for jp in range(s):
        assert np.array_equal(ans.R[jp], R[jp])


def test_combination_fails_without_consensus(rng):
    q, m, s, c = 31, 2, 3, 2
    B = rng.choice(all_points(q, m)[1:], size=30, replace=False)
    ls = multi_indices(m, c)
    table = LineTable(B, tuple(ls))
    for k in range(len(B)):
        for li in range(len(ls)):
            table.coeffs[(k, li)] = rng.integers(0, q, size=s)
    assert jet_combination_decode(table, c, s, q, rng, budget=30) is None


@pytest.mark.parametrize("c", [1, 2, 3])
def test_joints_bound_exhaustive(c):
    # homogeneous R of degree j' < 2c vanishing to order c at e1 and e2 is 0
    q, m = 5, 2
    F = prime_field(q)
    E = np.array([[1, 0], [0, 1]])
    ls = multi_indices(m, c)
    for jp in range(2 * c):
        s = jp + 1
        A = constraint_matrix(q, m, jp, ls, direction_powers(q, E, s), s).reshape(-1, jp + 1)
        mons = exact_weight(m, jp)
        vanishing = 0
        for coeffs in itertools.product(range(q), repeat=jp + 1):
            if not (A @ np.array(coeffs) % q).any():
                vanishing += 1
        assert vanishing == 1
        # and for every pair of independent directions
        for b1, b2 in itertools.combinations(all_points(q, m)[1:], 2):
            Bm = np.array([b1, b2])
            if linalg.rank(F, Bm) < 2:
                continue
            A = constraint_matrix(q, m, jp, ls, direction_powers(q, Bm, s), s).reshape(-1, len(mons))
            assert linalg.rank(F, A) == len(mons)


def test_m_line_order():
    assert m_line_order(4, 2, 4) == 4
    assert m_line_order(4, 2, 20) == 8
    assert m_line_order(3, 3, 20) == 5  # c' = 9/2


@pytest.mark.parametrize("seed", range(5))
def test_variations_on_clean_words(seed):
    P, cw, _, rng = setup(SMALL, seed)
    cfg = LocalConfig.build(SMALL, Fraction(1, 100))
    a = rng.integers(0, 31, size=2)
    truth = order_s_evaluation(P, a, 4)
    o = Oracle(cw)
    assert np.array_equal(recover_low_order_jet(o, a, cfg, rng), truth[: len(multi_indices(2, cfg.c))])
    assert o.queries == 31
    o = Oracle(cw)
    assert np.array_equal(m_line_correct(o, a, cfg, rng), truth)
    assert o.queries == 62


def test_m_line_beyond_s_on_clean_word():
    # c = 4 lines up to order 8 when s allows it
    p = CodeParams(31, 2, 10, 40)
    P, cw, _, rng = setup(p, 3)
    cfg = LocalConfig.build(p, Fraction(1, 100), c=4)
    a = np.array([7, 7])
    u = m_line_correct(Oracle(cw), a, cfg, rng)
    assert np.array_equal(u, order_s_evaluation(P, a, 8))


def test_single_line_with_c_one(rng):
    P, cw, _, _ = setup(SMALL, 5)
    cfg = LocalConfig.build(SMALL, Fraction(1, 100), c=1)
    a = np.array([1, 2])
    assert recover_low_order_jet(Oracle(cw), a, cfg, rng).tolist() == [P(a)]


def test_m_line_needs_two_variables():
    p = CodeParams(31, 1, 4, 12)
    cfg = LocalConfig.build(p, Fraction(1, 100))
    with pytest.raises(ValueError):
        m_line_correct(Oracle(encode(p, MVPoly.zero(p.field, 1))), (0,), cfg)


def test_scheme_preset():
    pre = SchemePreset(13, 2, 20, 5)
    assert pre.d == 130 and pre.small_len == 15 and pre.params.sym_len == 210
    assert pre.alphabet_ratio() == 14
    with pytest.raises(ValueError):
        SchemePreset(13, 2, 3, 2)  # (c+m)q >= d


@pytest.mark.parametrize("q, m, s, c", [(7, 2, 10, 2), (5, 2, 12, 3), (5, 3, 14, 2)])
def test_scheme_interpolation(q, m, s, c, rng):
    pre = SchemePreset(q, m, s, c)
    f = rng.integers(0, q, size=(q ** m, pre.small_len))
    P = scheme_interpolate(pre, f)
    assert P.degree() < (c + m) * q
    for k, a in enumerate(all_points(q, m)):
        assert np.array_equal(order_s_evaluation(P, a, c), f[k])


def test_scheme_zero_message(rng):
    pre = SchemePreset(7, 2, 10, 2)
    cw = scheme_encode(pre, np.zeros((49, pre.small_len), dtype=np.int64))
    assert not cw.symbols.any()
    assert scheme_query(Oracle(cw), (3, 3), pre, rng).tolist() == [0] * pre.small_len

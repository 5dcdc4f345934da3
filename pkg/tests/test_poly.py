import itertools
import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from multcode.gf import prime_field
from multcode.poly import (
    INFINITY,
    MultiIndex,
    MVPoly,
    UVPoly,
    binom_mod,
    exact_weight,
    hasse_derivative,
    line_jet_coefficients,
    monomials,
    multi_indices,
    multiplicity,
    order_s_evaluation,
    poly_divmod,
    poly_mul,
    restrict_to_line,
)

from oracles import evaluate, graded, hasse, jet


def X2Y(q):
    return MVPoly(prime_field(q), 2, {(2, 1): 1})


@st.composite
def polys(draw, q=None, m=None, deg=6):
    q = draw(st.sampled_from([3, 5, 13])) if q is None else q
    m = draw(st.integers(1, 3)) if m is None else m
    d = draw(st.integers(0, deg))
    mons = monomials(m, d)
    picks = draw(st.lists(st.sampled_from(mons), max_size=8))
    terms = {e: draw(st.integers(1, q - 1)) for e in picks}
    return MVPoly(prime_field(q), m, terms)


def test_multi_index_order_is_graded_lex():
    assert multi_indices(2, 3) == ((0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0))
    assert exact_weight(3, 1) == ((0, 0, 1), (0, 1, 0), (1, 0, 0))
    assert [tuple(i) for i in multi_indices(3, 4)] == graded(3, 4)
    i = MultiIndex((2, 0, 1))
    assert i.wt == 3


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_binom_mod_lucas(p):
    from math import comb

    for n in range(60):
        for k in range(n + 2):
            assert binom_mod(n, k, p) == comb(n, k) % p


@pytest.mark.parametrize(
    "q, terms, i, want",
    [
        (2, {(3,): 1}, (2,), {(1,): 1}),
        (5, {(2, 1): 1}, (1, 1), {(1, 0): 2}),
        (7, {(0, 0): 4}, (0, 1), {}),
        (3, {(3,): 1}, (1,), {}),  # 3 X^2 = 0 in characteristic 3
    ],
)
def test_hasse_examples(q, terms, i, want):
    m = len(i)
    P = MVPoly(prime_field(q), m, terms)
    assert hasse_derivative(P, i).terms == want


@given(polys(), st.data())
def test_hasse_matches_shift_expansion(P, data):
    i = data.draw(st.tuples(*[st.integers(0, 4)] * P.m))
    assert hasse_derivative(P, i).terms == hasse(P.terms, P.m, P.field.q, i)


def test_order_s_evaluation_examples():
    F3 = prime_field(3)
    assert order_s_evaluation(MVPoly(F3, 1, {(2,): 1}), (2,), 2).tolist() == [1, 1]
    assert order_s_evaluation(X2Y(5), (0, 0), 2).tolist() == [0, 0, 0]
    assert order_s_evaluation(MVPoly.zero(F3, 2), (1, 1), 3).tolist() == [0] * 6


@given(polys(), st.data())
def test_order_s_evaluation_matches_oracle(P, data):
    q, m = P.field.q, P.m
    a = data.draw(st.tuples(*[st.integers(0, q - 1)] * m))
    s = data.draw(st.integers(1, 4))
    assert order_s_evaluation(P, a, s).tolist() == jet(P.terms, m, q, a, s)


def test_multiplicity_examples():
    P = X2Y(5)
    assert multiplicity(P, (0, 0)) == 3
    assert multiplicity(P, (1, 0)) == 1
    assert multiplicity(P, (1, 1)) == 0
    assert multiplicity(MVPoly.zero(prime_field(5), 2), (0, 0)) == INFINITY


@given(polys(q=5, m=2, deg=5), st.tuples(st.integers(0, 4), st.integers(0, 4)))
def test_multiplicity_is_first_nonvanishing_weight(P, a):
    M = multiplicity(P, a)
    if P.is_zero():
        assert M == INFINITY
        return
    jets = jet(P.terms, 2, 5, a, int(P.degree()) + 2)
    first = next(k for k, v in enumerate(jets) if v)
    assert M == sum(graded(2, int(P.degree()) + 2)[first])


@given(polys(), polys())
def test_derivative_is_additive(P, Q):
    if (P.field.q, P.m) != (Q.field.q, Q.m):
        Q = MVPoly(P.field, P.m, {})
    for i in multi_indices(P.m, 3):
        assert hasse_derivative(P + Q, i) == hasse_derivative(P, i) + hasse_derivative(Q, i)


@given(polys(q=5, m=2), polys(q=5, m=2))
def test_product_rule(P, Q):
    for i in multi_indices(2, 4):
        rhs = MVPoly.zero(P.field, 2)
        for l in itertools.product(*(range(k + 1) for k in i)):
            rest = tuple(a - b for a, b in zip(i, l))
            rhs = rhs + hasse_derivative(P, l) * hasse_derivative(Q, rest)
        assert hasse_derivative(P * Q, i) == rhs


@given(polys(q=3), st.data())
def test_iterated_derivative(P, data):
    from math import comb

    i = data.draw(st.tuples(*[st.integers(0, 3)] * P.m))
    j = data.draw(st.tuples(*[st.integers(0, 3)] * P.m))
    ij = tuple(a + b for a, b in zip(i, j))
    c = 1
    for a, b in zip(i, j):
        c *= comb(a + b, a)
    assert hasse_derivative(hasse_derivative(P, i), j) == hasse_derivative(P, ij).scale(c % 3)


@given(polys(), st.data())
def test_shift_identity(P, data):
    q, m = P.field.q, P.m
    a = data.draw(st.tuples(*[st.integers(0, q - 1)] * m))
    z = data.draw(st.tuples(*[st.integers(0, q - 1)] * m))
    d = int(max(P.degree(), 0))
    rhs = 0
    for i in multi_indices(m, d + 1):
        t = hasse_derivative(P, i)(a)
        for zk, ik in zip(z, i):
            t = t * pow(zk, ik, q)
        rhs += t
    assert P(tuple((x + y) % q for x, y in zip(a, z))) == rhs % q


def test_restrict_to_line_examples():
    P = X2Y(5)
    assert restrict_to_line(P, (0, 0), (1, 1)).coeffs == [0, 0, 0, 1]
    assert restrict_to_line(P, (2, 3), (0, 0)).coeffs == [P((2, 3))]


@given(polys(), st.data())
def test_restriction_coefficients(P, data):
    q, m = P.field.q, P.m
    a = data.draw(st.tuples(*[st.integers(0, q - 1)] * m))
    b = data.draw(st.tuples(*[st.integers(0, q - 1)] * m))
    Q = restrict_to_line(P, a, b)
    for t in range(q):
        assert Q(t) == P(tuple((x + t * y) % q for x, y in zip(a, b)))
    for j in range(int(max(P.degree(), 0)) + 1):
        assert Q.coeff(j) == line_jet_coefficients(P, a, b, (0,) * m, j)


@given(polys(q=13), st.data())
def test_line_jets_of_derivatives(P, data):
    q, m = P.field.q, P.m
    a = data.draw(st.tuples(*[st.integers(0, q - 1)] * m))
    b = data.draw(st.tuples(*[st.integers(0, q - 1)] * m))
    l = data.draw(st.tuples(*[st.integers(0, 2)] * m))
    Ql = restrict_to_line(hasse_derivative(P, l), a, b)
    for j in range(4):
        assert Ql.coeff(j) == line_jet_coefficients(P, a, b, l, j)
    # derivatives of the restriction at t are combinations of derivatives at a + tb
    t = data.draw(st.integers(0, q - 1))
    at = tuple((x + t * y) % q for x, y in zip(a, b))
    for j in range(4):
        assert Ql.hasse(j)(t) == line_jet_coefficients(P, at, b, l, j)


def test_line_jet_example():
    P = MVPoly(prime_field(5), 1, {(3,): 1})
    assert line_jet_coefficients(P, (1,), (2,), (1,), 1) == 2
    assert line_jet_coefficients(P, (1,), (2,), (0,), 0) == P((1,))


def test_json_round_trip_and_order(rng):
    F = prime_field(13)
    P = MVPoly.random(F, 2, 6, rng)
    text = P.to_json()
    obj = json.loads(text)
    exps = [tuple(t["exp"]) for t in obj["terms"]]
    assert exps == sorted(exps, key=lambda e: (sum(e), e))
    assert MVPoly.from_json(text) == P
    assert MVPoly.from_json(text).to_json() == text


@pytest.mark.parametrize(
    "text",
    [
        '{"q": 5, "m": 2, "terms": [{"exp": [1], "c": 1}]}',
        '{"q": 5, "m": 1, "terms": [{"exp": [1], "c": 7}]}',
        '{"q": 5, "m": 1, "terms": [{"exp": [1], "c": 1}, {"exp": [1], "c": 2}]}',
        '{"q": 6, "m": 1, "terms": []}',
    ],
)
def test_json_rejects_malformed(text):
    with pytest.raises(ValueError):
        MVPoly.from_json(text)


def test_zero_polynomial_has_no_terms():
    F = prime_field(5)
    P = MVPoly(F, 1, {(1,): 5, (2,): 3})
    assert P.terms == {(2,): 3}
    assert MVPoly.zero(F, 2).degree() == -INFINITY


@given(st.lists(st.integers(0, 12), max_size=6), st.lists(st.integers(0, 12), min_size=1, max_size=4))
def test_univariate_divmod(a, b):
    F = prime_field(13)
    if not any(b):
        return
    A, B = np.array(a or [0], dtype=np.int64), np.array(b, dtype=np.int64)
    quo, rem = poly_divmod(F, A, B)
    back = poly_mul(F, quo, B)
    n = max(len(back), len(rem), len(A))
    pad = lambda v: np.pad(np.asarray(v, dtype=np.int64), (0, n - len(v)))
    assert np.array_equal((pad(back) + pad(rem)) % 13, pad(A))
    assert UVPoly(F, rem.tolist()).degree() < UVPoly(F, b).degree()


def test_uv_poly_hasse_and_mv():
    F = prime_field(7)
    Q = UVPoly(F, [1, 2, 3, 4])
    assert Q.hasse(1).coeffs == [2, 6, 12 % 7]
    assert Q.to_mv()((2,)) == Q(2)
    assert Q.eval_many(np.arange(7)).tolist() == [Q(t) for t in range(7)]

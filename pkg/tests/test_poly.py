import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qqbf.errors import DomainError
from qqbf.poly import (
    INF,
    MultiPoly,
    MultiRationalFn,
    PaddedPair,
    Poly,
    RationalFn,
    coprime_check,
    evaluate,
    fn_from_json,
    is_inf,
    multi_eval,
    normalized_resultant,
    pad,
    rational_eval,
)

complexes = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


@pytest.mark.parametrize(
    "coeffs, z, expected",
    [
        ([1, 0], 5, 1),
        ([0, 0, 1], 1 + 1j, 2j),
        ([1, -2, 3], 2, 9),
    ],
)
def test_evaluate_examples(coeffs, z, expected):
    assert evaluate(Poly(coeffs), z) == pytest.approx(expected)


def test_evaluate_at_infinity():
    assert is_inf(evaluate(Poly([1, 2]), INF))
    assert evaluate(Poly([7]), INF) == 7


def test_zero_polynomial_conventions():
    z = Poly([0, 0, 0])
    assert z.coeffs == (0j,)
    assert z.degree == -1 and z.is_zero
    assert Poly([1, 2, 0, 0]).degree == 1


def test_non_finite_coefficient_rejected():
    with pytest.raises(DomainError):
        Poly([1, float("nan")])


@settings(max_examples=200, deadline=None)
@given(st.lists(complexes, min_size=1, max_size=9), complexes)
def test_horner_matches_power_sum(coeffs, z):
    naive = sum(c * z**j for j, c in enumerate(coeffs))
    got = evaluate(Poly(coeffs), z)
    assert abs(got - naive) <= 1e-12 * max(1.0, sum(abs(c) * abs(z) ** j for j, c in enumerate(coeffs)))


@pytest.mark.parametrize(
    "p, q, z, expected",
    [
        ([0, 1], [1], 3 - 4j, 3 - 4j),
        ([1], [0, 1], 0, INF),
        ([2, 1], [-1, 1], INF, 1),
        ([1], [0, 1], INF, 0),
        ([0, 0, 1], [1], INF, INF),
    ],
)
def test_rational_eval_examples(p, q, z, expected):
    got = rational_eval(RationalFn.from_coeffs(p, q), z)
    if is_inf(expected):
        assert is_inf(got)
    else:
        assert got == pytest.approx(expected)


@settings(max_examples=100, deadline=None)
@given(
    st.lists(complexes, min_size=2, max_size=4),
    st.lists(complexes, min_size=1, max_size=4),
    complexes.filter(lambda l: abs(l) > 1e-3),
    complexes,
)
def test_rational_eval_scale_invariant(p, q, lam, z):
    P, Q = Poly(p), Poly(q)
    if Q.is_zero or not coprime_check(P, Q):
        return
    f = RationalFn(P, Q)
    g = f.scale(lam)
    a, b = rational_eval(f, z), rational_eval(g, z)
    if is_inf(a) or abs(Q(z)) < 1e-6:
        return
    assert abs(a - b) <= 1e-12 * max(1.0, abs(a)) * 10


@pytest.mark.parametrize(
    "p, q, expected",
    [
        ([0, 1], [1], True),
        ([-1, 0, 1], [-1, 1], False),
        ([1, 0, 1], [-1, 0, 1], True),
    ],
)
def test_coprime_examples(p, q, expected):
    assert coprime_check(Poly(p), Poly(q)) is expected
    assert coprime_check(Poly(q), Poly(p)) is expected


def test_coprime_agrees_with_root_comparison(rng):
    # brute force: smallest distance between root sets
    for _ in range(100):
        P = Poly(rng.normal(size=3) + 1j * rng.normal(size=3))
        Q = Poly(rng.normal(size=3) + 1j * rng.normal(size=3))
        gap = np.abs(np.subtract.outer(np.roots(P.coeffs[::-1]), np.roots(Q.coeffs[::-1]))).min()
        if gap > 1e-3:
            assert coprime_check(P, Q)
    shared = Poly([-2, 1])
    P = Poly([1, 1]) * shared
    Q = Poly([3j, 1]) * shared
    assert normalized_resultant(P, Q) < 1e-12
    assert not coprime_check(P, Q)


@settings(max_examples=100, deadline=None)
@given(st.lists(complexes, min_size=1, max_size=5), st.lists(complexes, min_size=1, max_size=5))
def test_coprime_symmetric(p, q):
    P, Q = Poly(p), Poly(q)
    assert coprime_check(P, Q) == coprime_check(Q, P)


def test_rational_rejects_common_factor_and_zero_denominator():
    with pytest.raises(DomainError):
        RationalFn.from_coeffs([-1, 0, 1], [-1, 1])
    with pytest.raises(DomainError):
        RationalFn.from_coeffs([1], [0])


def test_pad_examples():
    p = pad(RationalFn.from_coeffs([0, 1], [1]), INF)
    assert (p.P, p.Q, p.target_n) == (Poly([0, 1]), Poly([1]), 2)
    p = pad(RationalFn.from_coeffs([1], [1]), 0)
    assert (p.P, p.Q) == (Poly([0, 1]), Poly([0, 1]))
    p = pad(RationalFn.from_coeffs([0, 0, 1], [1]), 1)
    assert p.P == Poly([0, 0, -1, 1]) and p.Q == Poly([-1, 1])
    assert isinstance(p, PaddedPair) and not p.is_reduced


def test_pad_preserves_values_off_the_root(rng):
    f = RationalFn.from_coeffs([1, 2j, -1], [0.5, 1])
    r = 0.3 - 0.7j
    g = pad(f, r)
    for z in rng.normal(size=10) + 1j * rng.normal(size=10):
        assert g.value([z]) == pytest.approx(f(z), rel=1e-12)


@pytest.mark.parametrize(
    "terms, zs, expected",
    [
        ({(1, 1): 1}, (2, 3), 6),
        ({(1, 0): 1, (0, 1): 1}, (1 + 1j, 1 - 1j), 2),
        ({(2, 1): 1, (0, 0): 3}, (2, 1j), 3 + 4j),
    ],
)
def test_multi_eval_examples(terms, zs, expected):
    assert multi_eval(MultiPoly(2, terms), zs) == pytest.approx(expected)


def test_multi_eval_length_mismatch():
    with pytest.raises(DomainError):
        multi_eval(MultiPoly(2, {(1, 1): 1}), [1])


def test_multipoly_degrees_and_zero_terms_dropped():
    p = MultiPoly(3, {(2, 0, 1): 1, (0, 1, 0): 0, (1, 0, 0): 2})
    assert p.degrees == (2, 0, 1)
    assert len(p.terms) == 2


def test_multirational_degree_and_value():
    f = MultiRationalFn(MultiPoly(2, {(1, 1): 1}), MultiPoly(2, {(0, 0): 1, (2, 0): 1}))
    assert f.degrees == (2, 1)
    assert is_inf(f.value([1j, 3]))
    assert f.value([2, 3]) == pytest.approx(6 / 5)


def test_json_roundtrip():
    f = RationalFn.from_coeffs([1, 2 - 1j], [0.5j, 0, 1])
    again = fn_from_json(json.loads(json.dumps(f.to_json())))
    assert again == f
    g = MultiRationalFn(MultiPoly(2, {(1, 0): 1.5, (0, 2): -1j}), MultiPoly(2, {(0, 0): 1}))
    again = fn_from_json(json.loads(json.dumps(g.to_json())))
    assert again.P.terms == g.P.terms and again.Q.terms == g.Q.terms


def test_json_rejects_unknown_fields():
    with pytest.raises(DomainError):
        fn_from_json({"P": {"coeffs": [[1, 0]]}, "Q": {"coeffs": [[1, 0]]}, "R": 1})
    with pytest.raises(DomainError):
        fn_from_json({"P": {"coeffs": [[1, 0]], "extra": 0}, "Q": {"coeffs": [[1, 0]]}})


def test_json_promotes_univariate_side():
    f = fn_from_json(
        {"P": {"k": 2, "terms": [{"index": [1, 1], "re": 1}]}, "Q": {"coeffs": [[1, 0]]}}
    )
    assert isinstance(f, MultiRationalFn) and f.degrees == (1, 1)

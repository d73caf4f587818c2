import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lblab.polynomials import (NEG_INF, MultiPoly, PolyVector, UniPoly,
                               chebyshev_U, chebyshev_U_zeros, poly_arith,
                               poly_eval, poly_from_json, poly_to_json,
                               sgn_chebyshev_moment)


def small_multipoly(nvars=2):
    coeff = st.fractions(min_value=-5, max_value=5, max_denominator=6)
    exps = st.tuples(*[st.integers(0, 3)] * nvars)
    return st.dictionaries(exps, coeff, max_size=4).map(lambda t: MultiPoly(nvars, t))


@settings(max_examples=60, deadline=None)
@given(small_multipoly(), small_multipoly(), small_multipoly())
def test_ring_axioms(a, b, c):
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a * b == b * a


def test_difference_of_squares():
    eta = MultiPoly.var(1, 0)
    assert (eta + 1) * (eta - 1) == eta * eta - 1


def test_add_zero_identity():
    p = MultiPoly(2, {(1, 2): Fraction(3, 7)})
    assert poly_arith(p, MultiPoly(2, {}), op="add") == p


def test_zero_degree_sentinel():
    assert MultiPoly(3, {}).total_degree == NEG_INF
    assert UniPoly([]).degree == NEG_INF
    assert UniPoly([0, 0]).degree == NEG_INF
    assert max(NEG_INF, 4) == 4  # degree arithmetic stays total


def test_eval_examples():
    p = MultiPoly(1, {(2,): 1, (0,): -1})  # eta^2 - 1
    assert poly_eval(p, (Fraction(2),)) == 3
    assert poly_eval(MultiPoly(1, {}), (Fraction(5),)) == 0
    with pytest.raises(ValueError):
        poly_eval(p, (1, 2))


def test_eval_gd_iterate_point():
    # two steps of gradient descent with L = 1 evaluated at eta = 1: 2 - 1 = 1
    p = UniPoly([2, -1])
    assert p(Fraction(1)) == 1


def test_indeterminate_count_mismatch():
    with pytest.raises(ValueError):
        MultiPoly(1, {(1,): 1}) + MultiPoly(2, {(1, 0): 1})


def test_affine_compose_maps_interval():
    # eta -> ((a-b)/2) eta + (a+b)/2 sends [-1, 1] onto [b, a]
    a, b = Fraction(4), Fraction(1)
    p = UniPoly.x().affine_compose((a - b) / 2, (a + b) / 2)
    assert p(Fraction(-1)) == b
    assert p(Fraction(1)) == a
    assert p.degree == 1


@settings(max_examples=30, deadline=None)
@given(st.fractions(min_value=-4, max_value=4, max_denominator=5).filter(lambda r: r != 0),
       st.fractions(min_value=-4, max_value=4, max_denominator=5))
def test_affine_compose_inverse_roundtrip(alpha, beta):
    p = UniPoly([Fraction(1, 3), -2, 0, 5])
    q = p.affine_compose(alpha, beta).affine_compose(1 / alpha, -beta / alpha)
    assert q == p


def test_chebyshev_small_cases():
    assert chebyshev_U(0) == UniPoly([1])
    assert chebyshev_U(2) == UniPoly([-1, 0, 4])
    assert chebyshev_U(3) == UniPoly([0, -4, 0, 8])
    for k in range(13):
        assert chebyshev_U(k).degree == k


def test_chebyshev_matches_sine_form():
    for k in range(13):
        p = chebyshev_U(k)
        for i in range(50):
            eta = -0.98 + i * (1.96 / 49)
            ref = math.sin((k + 1) * math.acos(eta)) / math.sqrt(1 - eta * eta)
            assert abs(float(p(eta)) - ref) <= 1e-10


def test_chebyshev_zeros():
    assert chebyshev_U_zeros(0) == []
    assert chebyshev_U_zeros(1) == pytest.approx([0.0])
    assert chebyshev_U_zeros(2) == pytest.approx([0.5, -0.5])
    z3 = chebyshev_U_zeros(3)
    assert z3 == pytest.approx([math.sqrt(2) / 2, 0.0, -math.sqrt(2) / 2])
    p3 = chebyshev_U(3)
    assert all(abs(float(p3(z))) < 1e-12 for z in z3)
    for k in range(1, 11):
        zs = chebyshev_U_zeros(k)
        assert all(x > y for x, y in zip(zs, zs[1:]))
        assert all(-1 < z < 1 for z in zs)


def test_sgn_orthogonality():
    # sgn(U_k) is orthogonal to every monomial of lower degree
    for k in range(1, 11):
        for j in range(k):
            assert abs(sgn_chebyshev_moment(j, k)) <= 1e-10


def test_sgn_moment_nonzero_at_degree_k():
    # at j = k the moment must not vanish, otherwise the check is vacuous
    assert abs(sgn_chebyshev_moment(2, 2)) > 1e-3


def test_serialization_roundtrip():
    p = MultiPoly(2, {(0, 0): Fraction(-1, 3), (2, 1): Fraction(7, 2)})
    assert poly_from_json(poly_to_json(p)) == p
    u = UniPoly([1, Fraction(1, 2)])
    assert poly_from_json(poly_to_json(u)) == u.to_multi()


def test_polyvector_degree_measures():
    x, y = MultiPoly.var(2, 0), MultiPoly.var(2, 1)
    v = PolyVector([x * x * y, y, MultiPoly(2, {})], budget=5)
    assert v.max_total_degree() == 3
    # per-variable: max degree in x is 2, in y is 1
    assert v.variable_degree_sum() == 3
    assert len(v) == 3

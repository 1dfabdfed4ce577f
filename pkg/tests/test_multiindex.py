from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from psdocalc import multiindex as mi
from psdocalc.errors import DimensionError


def test_leq_examples():
    assert mi.leq((0, 0), (1, 1))
    assert not mi.leq((1, 0), (0, 1))
    assert mi.leq((2, 3), (2, 3))


def test_leq_dimension_mismatch():
    with pytest.raises(DimensionError):
        mi.leq((1, 2), (1, 2, 3))


indices = st.lists(st.integers(-5, 5), min_size=1, max_size=4).map(tuple)


@given(st.integers(1, 4).flatmap(lambda n: st.tuples(*[
    st.tuples(*[st.integers(-5, 5) for _ in range(n)]) for _ in range(3)
])))
def test_leq_partial_order(triple):
    a, b, c = triple
    # reflexive, antisymmetric, transitive
    assert mi.leq(a, a)
    if mi.leq(a, b) and mi.leq(b, a):
        assert a == b
    if mi.leq(a, b) and mi.leq(b, c):
        assert mi.leq(a, c)


def test_binomial_examples():
    assert mi.binomial((2, 3), (1, 1)) == 6
    assert mi.binomial((5, -2), (0, 0)) == 1
    assert mi.binomial((-3, 7), (0, 0)) == 1


def falling_binomial(a, k):
    num = 1
    for j in range(k):
        num *= a - j
    den = 1
    for j in range(2, k + 1):
        den *= j
    return Fraction(num, den)


def test_binomial_negative_ones():
    for k1 in range(7):
        for k2 in range(7):
            expected = falling_binomial(-1, k1) * falling_binomial(-1, k2)
            assert mi.binomial((-1, -1), (k1, k2)) == expected == (-1) ** (k1 + k2)


def test_binomial_matches_falling_factorial_oracle():
    for a in range(-8, 9):
        for k in range(9):
            assert mi.binomial((a,), (k,)) == falling_binomial(a, k)


def test_binomial_pascal_recurrence():
    for a in range(-8, 9):
        for k in range(1, 9):
            lhs = mi.binomial((a,), (k,))
            rhs = mi.binomial((a - 1,), (k,)) + mi.binomial((a - 1,), (k - 1,))
            assert lhs == rhs


def test_binomial_rejects_negative_lower():
    with pytest.raises(ValueError):
        mi.binomial((2, 2), (1, -1))


def test_in_zplus():
    assert mi.in_zplus((1, 0))
    assert not mi.in_zplus((0, 0))
    assert not mi.in_zplus((-1, 2))


def test_iter_box_and_cones():
    box = list(mi.iter_box((-1, -1), (0, 0)))
    assert box == [(-1, -1), (-1, 0), (0, -1), (0, 0)]
    assert set(mi.iter_zplus(2, 2)) == {(1, 0), (0, 1), (1, 1), (2, 0), (0, 2)}
    assert set(mi.iter_ones_cone(2, 3)) == {(1, 1), (2, 1), (1, 2)}
    assert list(mi.iter_ones_cone(2, 1)) == []


def test_axis():
    assert mi.axis((1, 0, 0)) == 0
    assert mi.axis((0, 0, 1)) == 2
    assert mi.axis((1, 1, 0)) is None
    assert mi.axis((2, 0)) is None

"""Exact real scalars: canonical form, arithmetic, and sign decisions."""

import math
from fractions import Fraction

from hypothesis import given, settings, strategies as st

from uniformizer.surd import SurdScalar, is_square_free, square_free_part


def test_square_free_part_examples():
    assert square_free_part(1) == (1, 1)
    assert square_free_part(2) == (1, 2)
    assert square_free_part(12) == (2, 3)
    assert square_free_part(50) == (5, 2)
    assert is_square_free(10)
    assert not is_square_free(12)


def test_canonical_merging():
    # sqrt(8) = 2*sqrt(2), so sqrt(2) + sqrt(8) = 3*sqrt(2)
    s = SurdScalar.sqrt(2) + SurdScalar.sqrt(8)
    assert s == SurdScalar.sqrt(2, 3)
    # rational parts collapse onto d = 1
    s = SurdScalar.rational(2) + SurdScalar.sqrt(4)
    assert s == SurdScalar.rational(4)


def test_zero_is_syntactic():
    s = SurdScalar.sqrt(2) - SurdScalar.sqrt(8) + SurdScalar.sqrt(2, 1)
    assert s.is_zero
    assert s.sign() == 0


def test_sign_examples():
    assert SurdScalar.sqrt(2).sign() == 1
    assert (-SurdScalar.sqrt(2)).sign() == -1
    # 3 - 2*sqrt(2) > 0 since 9 > 8
    assert (SurdScalar.rational(3) - SurdScalar.sqrt(2, 2)).sign() == 1
    # 1 + sqrt(2) - sqrt(6) < 0: 1 + 1.414 - 2.449
    s = SurdScalar.rational(1) + SurdScalar.sqrt(2) - SurdScalar.sqrt(6)
    assert s.sign() == -1
    # three-term near-cancellation: sqrt(2) + sqrt(3) - sqrt(10) < 0
    s = SurdScalar.sqrt(2) + SurdScalar.sqrt(3) - SurdScalar.sqrt(10)
    assert s.sign() == -1


_COEFF = st.fractions(
    min_value=Fraction(-50), max_value=Fraction(50), max_denominator=12
)
_RADICAND = st.sampled_from([1, 2, 3, 5, 6, 7, 10, 11, 13])


@st.composite
def surds(draw, max_terms=3):
    n = draw(st.integers(min_value=0, max_value=max_terms))
    pairs = [(draw(_COEFF), draw(_RADICAND)) for _ in range(n)]
    return SurdScalar.make(pairs)


@given(surds())
@settings(max_examples=200)
def test_sign_matches_float_oracle(s):
    # the float value is an independent estimate; only trust it away from 0
    approx = sum(float(q) * math.sqrt(d) for q, d in s.terms)
    if abs(approx) > 1e-6:
        assert s.sign() == (1 if approx > 0 else -1)


@given(surds(), surds())
@settings(max_examples=150)
def test_comparison_consistent_with_subtraction(a, b):
    diff = (a - b).sign()
    assert (a > b) == (diff == 1)
    assert (a == b) == (diff == 0)
    assert (a < b) == (diff == -1)


@given(surds(), surds(), surds())
@settings(max_examples=100)
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert (a + b) + c == a + (b + c)
    assert a * (b + c) == a * b + a * c
    assert a - a == SurdScalar()


@given(surds())
@settings(max_examples=100)
def test_scale_matches_repeated_addition(s):
    assert s.scale(3) == s + s + s
    assert s.scale(0).is_zero

"""Ordered groups of values and positive-basis computation."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from uniformizer.errors import PreconditionError, ResourceError
from uniformizer.surd import SurdScalar
from uniformizer.valuegroup import (
    GroupOrder,
    brute_force_positive_basis,
    compare,
    convex_decompose,
    int_det,
    perron_is_valid,
    perron_positive_basis,
    rational_rank,
    unimodular_inverse,
)


def _order(*blocks):
    return GroupOrder(
        tuple(tuple(SurdScalar.make([(q, d)]) for q, d in block) for block in blocks)
    )


ORDER_R2 = _order([(1, 1), (1, 2)])  # weights 1, sqrt(2)
ORDER_2BLOCK = _order([(1, 1)], [(1, 1), (1, 2)])


def test_order_rejects_dependent_weights():
    with pytest.raises(PreconditionError):
        _order([(1, 2), (2, 2)])  # sqrt2 and 2*sqrt2 are dependent
    with pytest.raises(PreconditionError):
        _order([(-1, 1)])


def test_compare_is_lexicographic_across_blocks():
    # first block dominates regardless of the second
    a = ORDER_2BLOCK.element([1, -100, -100])
    b = ORDER_2BLOCK.element([0, 100, 100])
    assert compare(a, b) == 1
    # ties fall through to the second block
    c = ORDER_2BLOCK.element([1, 1, 0])
    d = ORDER_2BLOCK.element([1, 0, 1])  # 1 vs sqrt(2) in block 2
    assert compare(c, d) == -1


def test_sign_within_block_uses_exact_surds():
    # 3 - 2*sqrt(2) > 0
    assert ORDER_R2.element([3, -2]).sign() == 1
    assert ORDER_R2.element([-3, 2]).sign() == -1
    assert ORDER_R2.element([0, 0]).sign() == 0


def test_rational_rank_and_convex_decomposition():
    assert rational_rank(ORDER_2BLOCK) == 3
    dec = convex_decompose(ORDER_2BLOCK, 1)
    assert dec.quotient.ngens == 1
    assert dec.subgroup.ngens == 2
    g = ORDER_2BLOCK.element([2, 3, -1])
    assert dec.project_quotient(g).coords == (Fraction(2),)
    assert dec.project_subgroup(g).coords == (Fraction(3), Fraction(-1))
    with pytest.raises(PreconditionError):
        convex_decompose(ORDER_2BLOCK, 5)


def test_int_det_and_unimodular_inverse():
    m = [[3, -2], [-1, 1]]
    assert int_det(m) == 1
    inv = unimodular_inverse(m)
    assert inv == [[1, 2], [1, 3]]


def test_perron_known_instance_rank2():
    # weights (1, sqrt2), alpha = (2, -1): v = 2 - sqrt2 > 0
    alpha = ORDER_R2.element([2, -1])
    res = perron_positive_basis(ORDER_R2, [alpha])
    assert res.change == ((3, -2), (-1, 1))
    assert res.coeffs == ((1, 1),)
    assert perron_is_valid(ORDER_R2, [alpha], res)


def test_brute_force_oracle_rank2():
    hit = brute_force_positive_basis(ORDER_R2.blocks[0], [[2, -1]], bound=3)
    assert hit is not None
    basis, coeffs = hit
    assert basis == [[-1, 1], [2, -1]]
    assert coeffs == [[0, 1]]


def test_perron_multi_block_lift():
    alpha = ORDER_2BLOCK.element([1, 2, -1])
    res = perron_positive_basis(ORDER_2BLOCK, [alpha])
    assert perron_is_valid(ORDER_2BLOCK, [alpha], res)


def test_perron_rejects_negative_alpha():
    alpha = ORDER_R2.element([-2, 1])  # sqrt2 - 2 < 0
    with pytest.raises(PreconditionError):
        perron_positive_basis(ORDER_R2, [alpha])


def test_perron_cap_raises_resource_error(monkeypatch):
    import uniformizer.valuegroup as vg

    monkeypatch.setenv("UNIFORMIZER_MAX_PERRON_STEPS", "1")
    monkeypatch.setattr(vg, "brute_force_positive_basis", lambda *a, **k: None)
    order = _order([(1, 1), (1, 2), (1, 3)])
    alphas = [order.element([4, -1, -1]), order.element([5, -2, 1])]
    with pytest.raises(ResourceError):
        perron_positive_basis(order, alphas)


def test_perron_zero_alpha_and_empty():
    res = perron_positive_basis(ORDER_R2, [ORDER_R2.zero()])
    assert perron_is_valid(ORDER_R2, [ORDER_R2.zero()], res)
    res = perron_positive_basis(ORDER_R2, [])
    assert perron_is_valid(ORDER_R2, [], res)


# ---------------------------------------------------------------------------
# randomized properties

_WEIGHT_SETS = [
    [(1, 1), (1, 2)],
    [(1, 1), (1, 3)],
    [(2, 1), (1, 5)],
    [(1, 1), (1, 2), (1, 3)],
    [(1, 2), (1, 3), (1, 5)],
]


@st.composite
def perron_instances(draw):
    weights = draw(st.sampled_from(_WEIGHT_SETS))
    order = _order(weights)
    r = order.ngens
    n_alphas = draw(st.integers(min_value=1, max_value=4))
    alphas = []
    for _ in range(n_alphas):
        for _attempt in range(40):
            coords = [draw(st.integers(min_value=-5, max_value=5)) for _ in range(r)]
            g = order.element(coords)
            if g.sign() >= 0:
                alphas.append(g)
                break
    return order, alphas


@given(perron_instances())
@settings(max_examples=60, deadline=None)
def test_perron_output_always_valid(inst):
    order, alphas = inst
    res = perron_positive_basis(order, alphas)
    assert perron_is_valid(order, alphas, res)


@given(perron_instances())
@settings(max_examples=30, deadline=None)
def test_rank2_brute_force_agreement(inst):
    order, alphas = inst
    if order.ngens != 2:
        return
    res = perron_positive_basis(order, alphas)
    assert perron_is_valid(order, alphas, res)
    coords = [[int(c) for c in a.coords] for a in alphas]
    hit = brute_force_positive_basis(order.blocks[0], coords, bound=10)
    assert hit is not None
    basis, coeffs = hit
    # the oracle result satisfies the same contract
    for row in basis:
        assert order.element(row).sign() == 1
    assert int_det(basis) in (1, -1)
    for a, crow in zip(coords, coeffs):
        assert all(c >= 0 for c in crow)
        recon = [
            sum(crow[j] * basis[j][i] for j in range(len(basis)))
            for i in range(len(a))
        ]
        assert recon == a


@given(
    st.lists(st.integers(min_value=-20, max_value=20), min_size=3, max_size=3),
    st.lists(st.integers(min_value=-20, max_value=20), min_size=3, max_size=3),
)
@settings(max_examples=100)
def test_ordering_total_and_translation_invariant(a, b):
    order = _order([(1, 1), (1, 2), (1, 3)])
    ga, gb = order.element(a), order.element(b)
    c = compare(ga, gb)
    assert c in (-1, 0, 1)
    assert compare(gb, ga) == -c
    shift = order.element([1, -2, 3])
    assert compare(ga + shift, gb + shift) == c
    assert (ga == gb) == (c == 0)

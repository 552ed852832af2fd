"""Expression and series-literal parsing; round-trips with the printers."""

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from uniformizer.errors import ExprSyntaxError
from uniformizer.expr import parse_element, parse_series
from uniformizer.fields import GF, QQ
from uniformizer.polyfield import RationalFunction, SparsePoly, ratfun_str
from uniformizer.series import TruncatedSeries, equal_to_precision, series_str

Q = QQ()
F5 = GF(5)


def test_parse_polynomial():
    f = parse_element("2*x^3 - x*y + 5", Q, ("x", "y"))
    x = RationalFunction.variable(Q, 2, 0)
    y = RationalFunction.variable(Q, 2, 1)
    two = RationalFunction.const(Q, 2, 2)
    five = RationalFunction.const(Q, 2, 5)
    assert f == two * x ** 3 - x * y + five


def test_parse_quotients_and_parens():
    f = parse_element("(x + 1)/(x - 1)", Q, ("x",))
    assert ratfun_str(f, ("x",)) == "(x + 1)/(x - 1)"
    g = parse_element("x^-2", Q, ("x",))
    assert ratfun_str(g, ("x",)) == "(1)/(x^2)"
    h = parse_element("x^(-2)", Q, ("x",))
    assert g == h


def test_unary_minus_and_power_binding():
    f = parse_element("-x^2", Q, ("x",))
    x = RationalFunction.variable(Q, 1, 0)
    assert f == -(x ** 2)
    assert parse_element("-2^2", Q, ()) == RationalFunction.const(Q, 0, -4)


def test_parse_errors_carry_positions():
    with pytest.raises(ExprSyntaxError) as exc:
        parse_element("x + @", Q, ("x",))
    assert "(line 1, column 5)" in str(exc.value)
    with pytest.raises(ExprSyntaxError) as exc:
        parse_element("x + w", Q, ("x",))
    assert "unknown variable 'w'" in str(exc.value)
    with pytest.raises(ExprSyntaxError) as exc:
        parse_element("x /\n(x - x)", Q, ("x",))
    assert "division by zero" in str(exc.value)
    assert "(line 2, column 1)" in str(exc.value)
    with pytest.raises(ExprSyntaxError):
        parse_element("x + ", Q, ("x",))
    with pytest.raises(ExprSyntaxError):
        parse_element("x x", Q, ("x",))
    with pytest.raises(ExprSyntaxError):
        parse_element("0^-1", Q, ("x",))


def test_parse_series_literal():
    s = parse_series("1 + 3*t + 3*t^2 + O(t^6)", F5)
    assert [s.coefficient(k) for k in range(3)] == [1, 3, 3]
    assert s.precision == 6
    z = parse_series("O(t^4)", Q)
    assert z.is_zero_to_precision and z.precision == 4
    lau = parse_series("t^-1 + 2 + O(t)", Q)
    assert lau.offset == -1 and lau.coefficient(0) == 2


def test_parse_series_rational_head():
    # the head may be any univariate rational function; it is expanded
    s = parse_series("1/(1 - t) + O(t^5)", Q)
    assert [s.coefficient(k) for k in range(5)] == [1] * 5


def test_parse_series_errors():
    with pytest.raises(ExprSyntaxError):
        parse_series("1 + t", Q)  # missing the O(...) marker
    with pytest.raises(ExprSyntaxError):
        parse_series("1 + O(u^4)", Q)  # wrong variable inside O(...)
    with pytest.raises(ExprSyntaxError):
        parse_series("1 + O(t^4) + t", Q)  # trailing input


def test_series_round_trip():
    s = TruncatedSeries.make(F5, 1, [2, 0, 4], 9)
    again = parse_series(series_str(s), F5)
    assert equal_to_precision(s, again) and again.precision == s.precision


# ---------------------------------------------------------------------------
# printer -> parser round-trip on random elements


@st.composite
def ratfuns(draw, base, nvars):
    def poly():
        n = draw(st.integers(min_value=1, max_value=3))
        terms = []
        for _ in range(n):
            e = tuple(draw(st.integers(min_value=0, max_value=3)) for _ in range(nvars))
            terms.append((e, draw(st.integers(min_value=-6, max_value=6))))
        return SparsePoly.make(base, nvars, terms)

    num = poly()
    den = poly()
    if den.is_zero:
        den = SparsePoly.const(base, nvars, 1)
    return RationalFunction.make(num, den)


@given(st.sampled_from([0, 1]), st.data())
@settings(max_examples=80, deadline=None)
def test_rendered_elements_reparse(which, data):
    base = [Q, F5][which]
    names = ("t", "z")
    f = data.draw(ratfuns(base, 2))
    text = ratfun_str(f, names)
    assert parse_element(text, base, names) == f

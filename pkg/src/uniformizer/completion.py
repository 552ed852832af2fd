"""Discrete rational places realized through truncated series, and the
uniformization pipeline that runs through the completion.

The field is K0(t, z) with t a uniformizing transcendental and z an
algebraic generator given by a monic minimal polynomial over K0[t]
together with a residue; z itself is realized as a truncated root series
by Hensel lifting.  Elements are rational functions in (t, z); their
values are series orders, their residues the constant coefficients.

The pipeline splits any requested valuation-ring element into a short
relative block over K0(t) (three rows built from a separating truncation
a, the exact leading monomial b of the remainder, and the minimal
polynomial of w = b/(zeta - a), whose reduction is X^k - X^(k-1) in every
characteristic), collects all coefficient-field elements those blocks
use, uniformizes the coefficients over K0(t) with the monomial machinery,
and composes the two layers into one ground system.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    InsufficientPrecisionError,
    NotInValuationRingError,
    PreconditionError,
)
from .fields import BaseField, Scalar
from .polyfield import (
    RationalFunction,
    SparsePoly,
    hasse_derivative,
    ratfun_str,
)
from .series import (
    TruncatedSeries,
    equal_to_precision,
    eval_poly_at_series,
    eval_ratfun_at_series,
    poly_to_series,
    ratfun_to_series,
)
from .surd import SurdScalar
from .uniformize import TriangularSystem, compose, uniformize_abhyankar
from .valuation import MonomialPlace
from .valuegroup import GroupOrder

DEFAULT_PRECISION = 32


# ---------------------------------------------------------------------------
# The place handle and its verification context


@dataclass(frozen=True)
class DiscreteSeriesPlace:
    """K0(t, gens) with each generator realized as a truncated series."""

    base: BaseField
    uniformizer: str = "t"
    gen_names: tuple[str, ...] = ()
    gen_series: tuple[TruncatedSeries, ...] = ()
    precision: int = DEFAULT_PRECISION

    def __post_init__(self):
        if self.precision < 1:
            raise PreconditionError("precision must be at least 1")
        if len(self.gen_names) != len(self.gen_series):
            raise PreconditionError("generator names and series do not match up")
        names = (self.uniformizer,) + self.gen_names
        if len(set(names)) != len(names):
            raise PreconditionError("ambient generator names must be distinct")
        for name, s in zip(self.gen_names, self.gen_series):
            if s.base != self.base:
                raise PreconditionError(f"series for {name!r} is over the wrong field")
            if s.precision < self.precision:
                raise PreconditionError(
                    f"series for {name!r} is known to precision {s.precision}, "
                    f"the place claims {self.precision}"
                )
            o = s.order()
            if o is not None and o < 0:
                raise PreconditionError(f"generator {name!r} has negative value")

    @property
    def ambient_names(self) -> tuple[str, ...]:
        return (self.uniformizer,) + self.gen_names

    @property
    def nvars(self) -> int:
        return 1 + len(self.gen_names)

    def make_context(self, precision: int | None = None) -> "SeriesContext":
        return SeriesContext(self, precision)

    def element_series(self, rf: RationalFunction, precision: int | None = None) -> TruncatedSeries:
        return self.make_context(precision).ambient(rf)


class SeriesContext:
    """Evaluation of ambient rational functions into truncated series."""

    def __init__(self, place: DiscreteSeriesPlace, precision: int | None = None):
        if precision is None:
            precision = place.precision
        if precision > place.precision:
            raise InsufficientPrecisionError(
                f"place is realized to precision {place.precision}, "
                f"{precision} was requested",
                needed=precision,
            )
        self.place = place
        self.precision = precision
        t = TruncatedSeries.monomial(place.base, 1, precision)
        self.args = [t] + [g.truncate(precision) for g in place.gen_series]

    def ambient(self, rf: RationalFunction) -> TruncatedSeries:
        if rf.nvars != self.place.nvars or rf.base != self.place.base:
            raise PreconditionError("element does not live in the ambient field")
        return eval_ratfun_at_series(rf, self.args, self.precision)

    def coeff(self, rf: RationalFunction, names) -> TruncatedSeries:
        amb = self.place.ambient_names
        try:
            picked = [self.args[amb.index(n)] for n in names]
        except ValueError:
            raise PreconditionError(
                "coefficient field names missing from the ambient field"
            ) from None
        if rf.nvars != len(picked):
            raise PreconditionError("coefficient entry has the wrong width")
        return eval_ratfun_at_series(rf, picked, self.precision)

    def generator(self, i: int) -> TruncatedSeries:
        return self.args[i]

    def eval_poly(self, f: SparsePoly, args) -> TruncatedSeries:
        return eval_poly_at_series(f, args, self.precision)

    def one(self) -> TruncatedSeries:
        return TruncatedSeries.constant(self.place.base, 1, self.precision)

    def mul(self, a, b):
        return a * b

    def sub(self, a, b):
        return a - b

    def div(self, a, b):
        if b.is_zero_to_precision:
            raise ZeroDivisionError("division by a series that vanishes to precision")
        return a / b

    def is_zero(self, a) -> bool:
        return a.is_zero_to_precision

    def in_ring(self, a) -> bool:
        o = a.order()
        return o is None or o >= 0

    def value_sign(self, a) -> int:
        o = a.known_order()
        return 0 if o == 0 else (1 if o > 0 else -1)

    def value_str(self, a) -> str:
        return str(a.known_order())

    def residue_is_zero(self, a) -> bool:
        return a.residue() == 0

    def residue_str(self, a) -> str:
        return self.place.base.scalar_str(a.residue())

    def describe(self, a) -> str:
        from .series import series_str

        return series_str(a, self.place.uniformizer)


# ---------------------------------------------------------------------------
# Hensel lifting


def hensel_lift_root(f: SparsePoly, x0, precision: int) -> TruncatedSeries:
    """Root series of f(t, X) starting from a simple residue root x0.

    Requires f(0, x0) = 0 and (df/dX)(0, x0) != 0; Newton steps double the
    correct precision each round, and remain valid in characteristic p
    because only the first derivative is involved.
    """
    if f.nvars != 2:
        raise PreconditionError("expected a polynomial in (t, X)")
    if precision < 1:
        raise PreconditionError("precision must be at least 1")
    base = f.base
    x0 = base.coerce(x0)
    fbar = [(e, c) for e, c in f.terms if e[0] == 0]
    red = SparsePoly.make(base, 2, fbar)
    if red.evaluate([base.zero, x0]) != 0:
        raise PreconditionError("x0 is not a root of the reduction")
    dfdx = hasse_derivative(f, 1, var=1)
    dred = SparsePoly.make(base, 2, [(e, c) for e, c in dfdx.terms if e[0] == 0])
    if dred.evaluate([base.zero, x0]) == 0:
        raise PreconditionError(
            "x0 is not a simple root of the reduction; the root does not lift"
        )
    z = TruncatedSeries.constant(base, x0, 1)
    p = 1
    while p < precision:
        p2 = min(2 * p, precision)
        # the known coefficients form a polynomial approximant; Newton
        # corrects everything beyond the old precision automatically
        zt = TruncatedSeries.make(base, z.offset, list(z.coeffs), p2)
        t = TruncatedSeries.monomial(base, 1, p2)
        fz = eval_poly_at_series(f, [t, zt], p2)
        dz = eval_poly_at_series(dfdx, [t, zt], p2)
        z = zt - fz / dz
        p = p2
    return z


# ---------------------------------------------------------------------------
# Separating truncations and the value formula


@dataclass(frozen=True)
class ApproximationWitness:
    """A truncation a of z and the monomial b with distinct term values.

    For each input polynomial the table lists (i, v(f^[i](a) * b^i)) over
    the indices with f^[i](a) nonzero; all listed values are pairwise
    distinct, which makes  v f(z) = min_i v(f^[i](a) b^i)  exact.
    """

    fs: tuple[SparsePoly, ...]
    z: TruncatedSeries
    a: SparsePoly
    b_coeff: Scalar
    b_exp: int
    depth: int
    tables: tuple[tuple[tuple[int, int], ...], ...]


def _truncation_poly(z: TruncatedSeries, below: int) -> SparsePoly:
    """The terms of z with exponent < below, as a polynomial in t."""
    if z.order() is not None and z.order() < 0:
        raise PreconditionError("series with negative order cannot be truncated to a polynomial")
    out = []
    for k in range(max(0, z.offset), min(below, z.precision)):
        c = z.coefficient(k)
        if c != 0:
            out.append(((k,), c))
    return SparsePoly.make(z.base, 1, out)


def _value_table(f: SparsePoly, a: SparsePoly, b_exp: int) -> tuple[tuple[int, int], ...]:
    """(i, v(f^[i](a) b^i)) for every i with f^[i](a) nonzero; exact."""
    if f.nvars != 2:
        raise PreconditionError("expected a polynomial in (t, X)")
    deg = f.degree_in(1) if not f.is_zero else 0
    rows = []
    for i in range(deg + 1):
        fi = hasse_derivative(f, i, var=1)
        val = _eval_at_poly(fi, a)
        if val.is_zero:
            continue
        ord_t = min(e[0] for e, _ in val.terms)
        rows.append((i, ord_t + i * b_exp))
    return tuple(rows)


def _eval_at_poly(f: SparsePoly, a: SparsePoly) -> SparsePoly:
    """f(t, a(t)) as an exact polynomial in t."""
    base = f.base
    acc = SparsePoly.zero(base, 1)
    for e, c in f.terms:
        term = SparsePoly.make(base, 1, [((e[0],), c)])
        acc = acc + term * (a ** e[1])
    return acc


def kaplansky_normalize(fs, z: TruncatedSeries, max_depth: int | None = None) -> ApproximationWitness:
    """Find a truncation a of z whose term values separate, per polynomial.

    Doubles the truncation depth until, for every input polynomial, the
    nonzero values v(f^[i](a) b^i) are pairwise distinct, where b is the
    exact leading monomial of z - a.  Raises InsufficientPrecisionError
    (carrying the last depth tried) when the series precision runs out
    before separation happens.
    """
    fs = tuple(fs)
    for f in fs:
        if f.nvars != 2:
            raise PreconditionError("polynomials must live in (t, X)")
    if z.is_zero_to_precision:
        raise InsufficientPrecisionError(
            "series is zero to its precision; nothing to normalize", needed=z.precision
        )
    offset = z.known_order()
    if offset < 0:
        raise PreconditionError("series must lie in the valuation ring")
    d = 1
    while True:
        if max_depth is not None and d > max_depth:
            raise InsufficientPrecisionError(
                f"no separating truncation up to depth {max_depth}", needed=d
            )
        below = offset + d
        if below > z.precision:
            raise InsufficientPrecisionError(
                "series precision exhausted before the term values separated",
                needed=below,
            )
        a = _truncation_poly(z, below)
        rest = z - poly_to_series(a, z.precision)
        if rest.is_zero_to_precision:
            raise InsufficientPrecisionError(
                "z - a vanishes to precision; cannot take its leading monomial",
                needed=z.precision + 1,
            )
        b_exp = rest.known_order()
        b_coeff = rest.coefficient(b_exp)
        tables = tuple(_value_table(f, a, b_exp) for f in fs)
        if all(len({v for _, v in tab}) == len(tab) for tab in tables):
            return ApproximationWitness(
                fs=fs, z=z, a=a, b_coeff=b_coeff, b_exp=b_exp, depth=d, tables=tables
            )
        d *= 2


def value_via_lvpol(witness: ApproximationWitness, f: SparsePoly) -> int:
    """v f(z) as min_i v(f^[i](a) b^i), valid because those values are distinct."""
    tab = None
    for g, t in zip(witness.fs, witness.tables):
        if g == f:
            tab = t
            break
    if tab is None:
        tab = _value_table(f, witness.a, witness.b_exp)
        if len({v for _, v in tab}) != len(tab):
            raise PreconditionError(
                "the witness truncation does not separate this polynomial's term values"
            )
    if not tab:
        raise PreconditionError("f vanishes identically at the witness data")
    return min(v for _, v in tab)


# ---------------------------------------------------------------------------
# Univariate polynomial arithmetic over the rational-function field K0(t)

_RF = RationalFunction


def _rf_zero(base: BaseField) -> _RF:
    return _RF.const(base, 1, 0)


def _rf_one(base: BaseField) -> _RF:
    return _RF.const(base, 1, 1)


def _up_trim(p: list) -> list:
    while p and p[-1].is_zero:
        p.pop()
    return p


def _up_deg(p: list) -> int:
    return len(p) - 1


def _up_add(a: list, b: list, base) -> list:
    n = max(len(a), len(b))
    z = _rf_zero(base)
    return _up_trim([
        (a[i] if i < len(a) else z) + (b[i] if i < len(b) else z) for i in range(n)
    ])


def _up_neg(a: list) -> list:
    return [-c for c in a]


def _up_mul(a: list, b: list, base) -> list:
    if not a or not b:
        return []
    z = _rf_zero(base)
    out = [z] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca.is_zero:
            continue
        for j, cb in enumerate(b):
            if cb.is_zero:
                continue
            out[i + j] = out[i + j] + ca * cb
    return _up_trim(out)


def _up_divmod(a: list, b: list, base) -> tuple[list, list]:
    if not b:
        raise ZeroDivisionError("division by the zero polynomial")
    z = _rf_zero(base)
    r = list(a)
    q = [z] * max(0, len(a) - len(b) + 1)
    db = _up_deg(b)
    inv_lead = _rf_one(base) / b[-1]
    while _up_trim(r) and _up_deg(r) >= db:
        dr = _up_deg(r)
        c = r[-1] * inv_lead
        q[dr - db] = q[dr - db] + c
        for i in range(len(b)):
            r[dr - db + i] = r[dr - db + i] - c * b[i]
        r = _up_trim(r)
    return _up_trim(q), _up_trim(r)


def _up_mod(a: list, b: list, base) -> list:
    return _up_divmod(a, b, base)[1]


def _up_ext_gcd(a: list, b: list, base) -> tuple[list, list, list]:
    """(g, u, v) with u*a + v*b = g, g monic."""
    one, zero = _rf_one(base), _rf_zero(base)
    r0, r1 = list(a), list(b)
    u0, u1 = [one], []
    v0, v1 = [], [one]
    while _up_trim(list(r1)):
        q, r = _up_divmod(r0, r1, base)
        r0, r1 = r1, r
        u0, u1 = u1, _up_add(u0, _up_neg(_up_mul(q, u1, base)), base)
        v0, v1 = v1, _up_add(v0, _up_neg(_up_mul(q, v1, base)), base)
    if not r0:
        return [], u0, v0
    lead = r0[-1]
    scale = one / lead
    return (
        [c * scale for c in r0],
        [c * scale for c in u0],
        [c * scale for c in v0],
    )


def _poly2_to_up(f: SparsePoly) -> list:
    """SparsePoly in (t, X) -> coefficients in K0(t) indexed by X-degree."""
    base = f.base
    deg = f.degree_in(1) if not f.is_zero else -1
    out = []
    for k in range(deg + 1):
        terms = [((e[0],), c) for e, c in f.terms if e[1] == k]
        out.append(_RF.from_poly(SparsePoly.make(base, 1, terms)))
    return _up_trim(out)


def _ratfun2_to_up_pair(f: RationalFunction) -> tuple[list, list]:
    return _poly2_to_up(f.num), _poly2_to_up(f.den)


class _QuotientRing:
    """K0(t)[X] / (m), with m monic; elements are coefficient vectors."""

    def __init__(self, base: BaseField, m: list):
        self.base = base
        self.m = m
        self.dim = _up_deg(m)

    def reduce(self, p: list) -> list:
        return self._pad(_up_mod(p, self.m, self.base))

    def _pad(self, p: list) -> list:
        z = _rf_zero(self.base)
        return list(p) + [z] * (self.dim - len(p))

    def mul(self, a: list, b: list) -> list:
        return self.reduce(_up_mul(_up_trim(list(a)), _up_trim(list(b)), self.base))

    def inverse(self, a: list) -> list:
        at = _up_trim(list(a))
        if not at:
            raise ZeroDivisionError("element is zero in the quotient ring")
        g, u, _ = _up_ext_gcd(at, self.m, self.base)
        if _up_deg(g) != 0:
            raise PreconditionError("element is a zero divisor modulo the minimal polynomial")
        inv_g = _rf_one(self.base) / g[0]
        return self.reduce([c * inv_g for c in u])

    def of_ratfun(self, f: RationalFunction) -> list:
        num, den = _ratfun2_to_up_pair(f)
        return self.mul(self._pad(self.reduce(num)), self.inverse(self.reduce(den)))

    def min_poly(self, w: list) -> list:
        """Monic minimal polynomial of w over K0(t), by incremental kernels."""
        base = self.base
        one, zero = _rf_one(base), _rf_zero(base)
        # rows[i] = reduced echelon form data over the power basis
        pivots: list[tuple[int, list, list]] = []  # (pivot col, vector, expression over powers)
        power = self._pad([one])
        k = 0
        while True:
            vec = list(power)
            expr = [zero] * (self.dim + 1)
            expr[k] = one
            for col, pvec, pexpr in pivots:
                c = vec[col]
                if not c.is_zero:
                    vec = [a - c * b for a, b in zip(vec, pvec)]
                    expr = [a - c * b for a, b in zip(expr, pexpr)]
            col = next((i for i, c in enumerate(vec) if not c.is_zero), None)
            if col is None:
                # dependency found: expr gives the minimal polynomial
                lead = expr[k]
                coeffs = [c / lead for c in expr[: k + 1]]
                return _up_trim(coeffs)
            inv = one / vec[col]
            pivots.append((col, [c * inv for c in vec], [c * inv for c in expr]))
            k += 1
            if k > self.dim:  # pragma: no cover - dimension bound
                raise PreconditionError("no dependency found below the ring dimension")
            power = self.mul(power, w)

# ---------------------------------------------------------------------------
# Relative triangular blocks over the coefficient field K0(t)


class _CoeffPool:
    """Ordered, deduplicated registry of coefficient-field elements.

    Non-constant elements of K0(t) become c-variables; constants are
    inlined into the rows directly.
    """

    def __init__(self, base: BaseField):
        self.base = base
        self.entries: list[RationalFunction] = []

    def ref(self, rf: RationalFunction):
        """('const', scalar) or ('coeff', index)."""
        if rf.is_constant:
            return ("const", rf.constant_value())
        for i, known in enumerate(self.entries):
            if known == rf:
                return ("coeff", i)
        self.entries.append(rf)
        return ("coeff", len(self.entries) - 1)


class _RowBuilder:
    """Accumulates one row as terms over (t-vars | X-vars | c-vars).

    Widths are not known until the pool is frozen, so terms carry the
    c-index separately and are materialized at the end.
    """

    def __init__(self, base: BaseField, s: int, n: int):
        self.base = base
        self.s = s
        self.n = n
        self.terms: list[tuple[tuple[int, ...], int | None, Scalar]] = []

    def add(self, txexp: tuple[int, ...], ref_or_none, scalar: Scalar = 1):
        """txexp covers the s + n leading variables; ref is a pool ref or None."""
        c_idx = None
        c = self.base.coerce(scalar)
        if ref_or_none is not None:
            kind, payload = ref_or_none
            if kind == "const":
                c = self.base.mul(c, payload)
            else:
                c_idx = payload
        if c != 0:
            self.terms.append((tuple(txexp), c_idx, c))

    def materialize(self, nc: int) -> SparsePoly:
        width = self.s + self.n + nc
        out = []
        for txexp, c_idx, c in self.terms:
            e = list(txexp) + [0] * nc
            if c_idx is not None:
                e[self.s + self.n + c_idx] += 1
            out.append((tuple(e), c))
        return SparsePoly.make(self.base, width, out)


def _up_entry_in_ring(rf: RationalFunction) -> bool:
    """Order of a K0(t) element at t = 0 is >= 0."""
    if rf.is_zero:
        return True
    ord_num = min(e[0] for e, _ in rf.num.terms)
    ord_den = min(e[0] for e, _ in rf.den.terms)
    return ord_num - ord_den >= 0


def _rf_t_poly(base: BaseField, p: SparsePoly) -> RationalFunction:
    return RationalFunction.from_poly(p)


def _monomial_poly(base: BaseField, coeff: Scalar, exp: int) -> SparsePoly:
    return SparsePoly.make(base, 1, [((exp,), coeff)])


def _ambient_rf_from_t_poly(base: BaseField, nvars: int, p: SparsePoly) -> RationalFunction:
    """Lift a polynomial in t alone into the ambient (t, gens) ring."""
    lifted = p.map_vars([0], nvars)
    return RationalFunction.from_poly(lifted)


@dataclass
class _Block:
    rows: list
    etas: list
    zeta_eta: int
    witness_exprs: list


def _series_leading_monomial(s: TruncatedSeries) -> tuple[Scalar, int]:
    if s.is_zero_to_precision:
        raise InsufficientPrecisionError(
            "series vanishes to precision; its leading monomial is not determined",
            needed=s.precision + 1,
        )
    e = s.known_order()
    return s.coefficient(e), e


def _zeta_block(
    pool: _CoeffPool,
    ring: _QuotientRing,
    ctx: SeriesContext,
    conj_series: list[TruncatedSeries],
    zeta: RationalFunction,
    n_before: int,
) -> _Block:
    """Rows for one valuation-ring element of K0(t, z).

    Elements of K0(t) itself give a single row X - c.  Anything of degree
    k >= 2 over K0(t) gives three rows: the minimal polynomial of
    w = b/(zeta - a) (whose reduction is X^k - X^(k-1)), the inversion row
    X_w * X_winv - 1, and the affine row X_zeta - b*X_winv - a.
    """
    base = pool.base
    nvars = ctx.place.nvars
    s_off = 0  # blocks use no t-variables of their own

    coords = ring.of_ratfun(zeta)
    h = ring.min_poly(coords)
    k = _up_deg(h)

    def prow():
        return _RowBuilder(base, 0, 0)  # widths fixed later by the caller

    if k == 1:
        # zeta already lies in K0(t): one affine row X - c
        c_rf = -h[0]
        if not _up_entry_in_ring(c_rf):
            raise NotInValuationRingError(
                f"element {ratfun_str(zeta, ctx.place.ambient_names)} lies outside the valuation ring"
            )
        row = ("affine1", n_before, pool.ref(c_rf))
        return _Block(rows=[row], etas=[zeta], zeta_eta=0, witness_exprs=[])

    # realize zeta and its conjugates as series
    zs = ctx.ambient(zeta)
    conj_vals = []
    for czs in conj_series:
        picked = [ctx.args[0]] + [czs]
        conj_vals.append(eval_ratfun_at_series(zeta, picked, ctx.precision))
    # cluster the conjugate values; the number of distinct ones must be k
    reps: list[TruncatedSeries] = []
    for v in conj_vals:
        if not any(equal_to_precision(v, r) for r in reps):
            reps.append(v)
    if len(reps) != k:
        raise InsufficientPrecisionError(
            f"found {len(reps)} distinct conjugate expansions but the minimal "
            f"polynomial has degree {k}; raise the precision",
            needed=2 * ctx.precision,
        )
    others = [r for r in reps if not equal_to_precision(r, zs)]
    if len(others) != k - 1:
        raise InsufficientPrecisionError(
            "conjugate expansions do not separate from the element itself",
            needed=2 * ctx.precision,
        )

    o = zs.order()
    if o is not None and o < 0:
        raise NotInValuationRingError(
            f"element {ratfun_str(zeta, ctx.place.ambient_names)} lies outside the valuation ring"
        )
    exps = []
    for r in others:
        diff = zs - r
        if diff.is_zero_to_precision:
            raise InsufficientPrecisionError(
                "conjugates collide to precision", needed=2 * ctx.precision
            )
        exps.append(diff.known_order())
    below = max(exps) + 1 if exps else 1
    below = max(below, 1)
    a_poly = _truncation_poly(zs, below)
    rest = zs - poly_to_series(a_poly, zs.precision)
    b_coeff, b_exp = _series_leading_monomial(rest)
    b_poly = _monomial_poly(base, b_coeff, b_exp)

    a_amb = _ambient_rf_from_t_poly(base, nvars, a_poly)
    b_amb = _ambient_rf_from_t_poly(base, nvars, b_poly)
    w_amb = b_amb / (zeta - a_amb)
    winv_amb = (zeta - a_amb) / b_amb

    w_coords = ring.of_ratfun(w_amb)
    hw = ring.min_poly(w_coords)
    if _up_deg(hw) != k:
        raise PreconditionError(
            "w = b/(zeta - a) does not generate the same extension; "
            "this lies outside the realized scope"
        )
    # sanity: each coefficient must lie in the valuation ring and reduce to
    # the coefficients of X^k - X^(k-1)
    for i, c in enumerate(hw[:-1] + [_rf_one(base)]):
        if not _up_entry_in_ring(c):
            raise PreconditionError(
                "minimal polynomial of w has a coefficient outside the valuation ring"
            )
        res = _rf_residue_at_zero(base, c)
        want = base.zero
        if i == k:
            want = base.one
        elif i == k - 1:
            want = base.neg(base.one)
        if res != want:
            raise InsufficientPrecisionError(
                "minimal polynomial of w does not reduce to X^k - X^(k-1); "
                "the truncation depth or precision is too small",
                needed=2 * ctx.precision,
            )

    rows = [
        ("minpoly", n_before, [pool.ref(c) for c in hw[:-1]], k),
        ("invert", n_before, n_before + 1),
        (
            "affine3",
            n_before + 2,
            n_before + 1,
            pool.ref(_RF.from_poly(b_poly)),
            pool.ref(_RF.from_poly(a_poly)) if not a_poly.is_zero else None,
        ),
    ]
    etas = [w_amb, winv_amb, zeta]
    return _Block(rows=rows, etas=etas, zeta_eta=2, witness_exprs=[(n_before + 1, b_poly, a_poly)])


def _rf_residue_at_zero(base: BaseField, rf: RationalFunction) -> Scalar:
    """Value of a K0(t) element at t = 0; requires order >= 0."""
    if rf.is_zero:
        return base.zero
    ord_num = min(e[0] for e, _ in rf.num.terms)
    ord_den = min(e[0] for e, _ in rf.den.terms)
    if ord_num < ord_den:
        raise NotInValuationRingError("element has negative order at t = 0")
    if ord_num > ord_den:
        return base.zero
    cn = next(c for e, c in rf.num.terms if e[0] == ord_num)
    cd = next(c for e, c in rf.den.terms if e[0] == ord_den)
    return base.div(cn, cd)


def _materialize_rows(base: BaseField, n_total: int, rows, nc: int) -> list[SparsePoly]:
    """Turn tagged row specs into polynomials over (X-vars | c-vars)."""
    out = []
    zero_e = (0,) * n_total

    def onehot(j, k=1):
        e = [0] * n_total
        e[j] = k
        return tuple(e)

    for row in rows:
        b = _RowBuilder(base, 0, n_total)
        kind = row[0]
        if kind == "affine1":
            _, j, ref = row
            b.add(onehot(j), None)
            b.add(zero_e, ref, -1)
        elif kind == "minpoly":
            _, j, refs, k = row
            b.add(onehot(j, k), None)
            for i, ref in enumerate(refs):
                b.add(onehot(j, i) if i else zero_e, ref)
        elif kind == "invert":
            _, j, j2 = row
            e = [0] * n_total
            e[j] = 1
            e[j2] = 1
            b.add(tuple(e), None)
            b.add(zero_e, None, -1)
        elif kind == "affine3":
            _, jz, jw, ref_b, ref_a = row
            b.add(onehot(jz), None)
            b.add(onehot(jw), ref_b, -1)
            if ref_a is not None:
                b.add(zero_e, ref_a, -1)
        else:  # pragma: no cover
            raise ValueError(f"unknown row kind {kind!r}")
        out.append(b.materialize(nc))
    return out


# ---------------------------------------------------------------------------
# Residue roots of the reduced minimal polynomial

_FP_ENUMERATION_LIMIT = 4096
_DIVISOR_LIMIT = 10**12


def _synthetic_div(base: BaseField, coeffs: list, r) -> list:
    """coeffs / (X - r); coeffs indexed by degree, remainder must vanish."""
    q = [base.zero] * (len(coeffs) - 1)
    acc = base.zero
    for k in range(len(coeffs) - 1, 0, -1):
        acc = base.add(coeffs[k], base.mul(r, acc))
        q[k - 1] = acc
    rem = base.add(coeffs[0], base.mul(r, acc))
    if rem != 0:
        raise PreconditionError("claimed residue root does not divide the reduction")
    return q


def _divisors(n: int) -> list[int]:
    n = abs(n)
    out = []
    d = 1
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            out.append(n // d)
        d += 1
    return sorted(set(out))


def _find_one_root(base: BaseField, coeffs: list) -> Scalar | None:
    deg = len(coeffs) - 1
    if deg == 1:
        return base.div(base.neg(coeffs[0]), coeffs[1])
    if base.is_rationals:
        shift = 0
        while coeffs[shift] == 0:
            shift += 1
        if shift:
            return Fraction(0)
        from math import lcm

        den = lcm(*[Fraction(c).denominator for c in coeffs])
        ints = [int(Fraction(c) * den) for c in coeffs]
        lead, const = ints[-1], ints[0]
        if abs(lead) > _DIVISOR_LIMIT or abs(const) > _DIVISOR_LIMIT:
            return None
        for p in _divisors(const):
            for q in _divisors(lead):
                for cand in (Fraction(p, q), Fraction(-p, q)):
                    acc = Fraction(0)
                    for c in reversed(coeffs):
                        acc = acc * cand + Fraction(c)
                    if acc == 0:
                        return cand
        return None
    if base.characteristic <= _FP_ENUMERATION_LIMIT:
        for cand in range(base.characteristic):
            acc = 0
            for c in reversed(coeffs):
                acc = (acc * cand + c) % base.characteristic
            if acc == 0:
                return cand
    return None


def _conjugate_residue_roots(base: BaseField, mbar: list, r0, provided) -> list:
    """Roots of mbar other than r0, found by repeated deflation.

    `provided`, when given, must list the remaining roots (with
    multiplicity); otherwise roots are searched by degree-1 formulas,
    rational-root candidates over Q, or enumeration over small prime
    fields.  Failure to split is reported as a precondition, with a hint
    to pass the conjugate residues explicitly.
    """
    rest = _synthetic_div(base, mbar, base.coerce(r0))
    roots = []
    if provided is not None:
        for r in provided:
            r = base.coerce(r)
            rest = _synthetic_div(base, rest, r)
            roots.append(r)
        if len(rest) != 1:
            raise PreconditionError(
                "conjugate_residues does not account for every root of the reduction"
            )
        return roots
    while len(rest) > 1:
        r = _find_one_root(base, rest)
        if r is None:
            raise PreconditionError(
                "could not split the reduced minimal polynomial over the residue "
                "field; pass conjugate_residues explicitly"
            )
        r = base.coerce(r)
        rest = _synthetic_div(base, rest, r)
        roots.append(r)
    return roots


# ---------------------------------------------------------------------------
# Presentations and the public constructors


@dataclass(frozen=True)
class DiscretePresentation:
    """K0(t) or K0(t, z) with z given by a monic minimal polynomial and a residue."""

    base: BaseField
    uniformizer: str = "t"
    gen_name: str = "z"
    min_poly: SparsePoly | None = None
    residue: Scalar = 0
    conjugate_residues: tuple | None = None

    def __post_init__(self):
        if self.min_poly is None:
            return
        m = self.min_poly
        if m.nvars != 2 or m.base != self.base:
            raise PreconditionError("min_poly must be a polynomial in (t, X) over the base field")
        if m.is_zero or m.degree_in(1) < 1:
            raise PreconditionError("min_poly must involve X")
        if self.uniformizer == self.gen_name:
            raise PreconditionError("generator names must be distinct")

    @property
    def ambient_names(self) -> tuple[str, ...]:
        if self.min_poly is None:
            return (self.uniformizer,)
        return (self.uniformizer, self.gen_name)


def _monic_min_poly(m: SparsePoly) -> SparsePoly:
    """Scale so the X^D coefficient is 1; it must be a nonzero constant."""
    base = m.base
    d = m.degree_in(1)
    lead_terms = [(e, c) for e, c in m.terms if e[1] == d]
    if len(lead_terms) != 1 or lead_terms[0][0][0] != 0:
        raise PreconditionError(
            "the X-leading coefficient of min_poly must be a nonzero constant"
        )
    c = lead_terms[0][1]
    if c == base.one:
        return m
    return m.scale(base.inv(c))


def realize_presentation(
    pres: DiscretePresentation, precision: int = DEFAULT_PRECISION
) -> tuple[DiscreteSeriesPlace, list[TruncatedSeries]]:
    """The series place and the full list of conjugate root series (main first)."""
    base = pres.base
    if pres.min_poly is None:
        place = DiscreteSeriesPlace(base, pres.uniformizer, (), (), precision)
        return place, []
    m = _monic_min_poly(pres.min_poly)
    z = hensel_lift_root(m, pres.residue, precision)
    mbar = [base.zero] * (m.degree_in(1) + 1)
    for e, c in m.terms:
        if e[0] == 0:
            mbar[e[1]] = c
    others = _conjugate_residue_roots(base, mbar, pres.residue, pres.conjugate_residues)
    conj = [z] + [hensel_lift_root(m, r, precision) for r in others]
    place = DiscreteSeriesPlace(base, pres.uniformizer, (pres.gen_name,), (z,), precision)
    return place, conj


def _witness_expr(base, n_total, nc, pool, j_winv, b_poly, a_poly) -> RationalFunction:
    b = _RowBuilder(base, 0, n_total)
    b.add(tuple(0 if i != j_winv else 1 for i in range(n_total)), pool.ref(_RF.from_poly(b_poly)))
    if not a_poly.is_zero:
        b.add((0,) * n_total, pool.ref(_RF.from_poly(a_poly)))
    return RationalFunction.from_poly(b.materialize(nc))


def uniformize_completion_algebraic(
    min_poly: SparsePoly,
    residue,
    precision: int = DEFAULT_PRECISION,
    *,
    uniformizer: str = "t",
    gen_name: str = "z",
    conjugate_residues=None,
) -> TriangularSystem:
    """Relative certificate over K0(t) for the extension by one algebraic series.

    The generator z is realized by Hensel lifting from the given residue;
    the system's coefficient field is K0(t), recorded through the
    coefficient table.
    """
    pres = DiscretePresentation(
        base=min_poly.base,
        uniformizer=uniformizer,
        gen_name=gen_name,
        min_poly=min_poly,
        residue=min_poly.base.coerce(residue),
        conjugate_residues=conjugate_residues,
    )
    place, conj = realize_presentation(pres, precision)
    base = place.base
    ctx = place.make_context()
    ring = _QuotientRing(base, _poly2_to_up(_monic_min_poly(min_poly)))
    pool = _CoeffPool(base)
    zeta = RationalFunction.variable(base, 2, 1)
    block = _zeta_block(pool, ring, ctx, conj, zeta, 0)
    n_total = len(block.rows)
    nc = len(pool.entries)
    fs = _materialize_rows(base, n_total, block.rows, nc)
    witnesses = []
    for j_winv, b_poly, a_poly in block.witness_exprs:
        witnesses.append((gen_name, _witness_expr(base, n_total, nc, pool, j_winv, b_poly, a_poly)))
    return TriangularSystem(
        place=place,
        tvars=(),
        etas=tuple(block.etas),
        fs=tuple(fs),
        coeff_field_names=(uniformizer,),
        coeff_table=tuple(pool.entries),
        zeta_indices=(block.zeta_eta,),
        witnesses=tuple(witnesses),
    )


def uniformize_immediate_simple(
    z: TruncatedSeries,
    zetas,
    *,
    uniformizer: str = "t",
    gen_name: str = "z",
    precision: int | None = None,
) -> TriangularSystem:
    """Certificate over K0(t) for K0(t, z) with z a series limit.

    A separating truncation a of z is found first; with b the exact
    leading monomial of z - a, every requested element g(z)/h(z) rewrites
    as a ratio of units in ztilde = (z - a)/b, giving one row per element
    whose X-partial is a unit.  T consists of ztilde alone.
    """
    base = z.base
    if precision is None:
        precision = z.precision
    place = DiscreteSeriesPlace(base, uniformizer, (gen_name,), (z,), precision)
    zetas = [_coerce_ambient(base, 2, f) for f in zetas]
    polys = []
    for f in zetas:
        if not f.num.is_zero:
            polys.append(f.num)
        polys.append(f.den)
    witness = kaplansky_normalize(polys, z)
    a_poly = witness.a
    b_poly = _monomial_poly(base, witness.b_coeff, witness.b_exp)

    n = len(zetas)
    pool = _CoeffPool(base)
    rows = []
    for j, f in enumerate(zetas):
        if f.num.is_zero:
            rows.append([((0,) + _onehot(n, j), None, 1)])
            continue
        gam_g = _gamma_table(f.num, a_poly, b_poly)
        gam_h = _gamma_table(f.den, a_poly, b_poly)
        m_h, c_h = _min_term(gam_h)
        m_g, c_g = _min_term(gam_g)
        if m_g < m_h:
            raise NotInValuationRingError(
                f"element {j + 1} lies outside the valuation ring"
            )
        n_h = _monomial_poly(base, c_h, m_h)
        terms = []
        for i, gi in enumerate(gam_h):
            if gi.is_zero:
                continue
            ref = pool.ref(_RF.from_poly(gi) / _RF.from_poly(n_h))
            terms.append(((i,) + _onehot(n, j), ref, 1))
        for i, gi in enumerate(gam_g):
            if gi.is_zero:
                continue
            ref = pool.ref(_RF.from_poly(gi) / _RF.from_poly(n_h))
            terms.append(((i,) + (0,) * n, ref, -1))
        rows.append(terms)

    # witness references can extend the pool, so take them before sizing rows
    wb = _RowBuilder(base, 1, n)
    wb.add((1,) + (0,) * n, pool.ref(_RF.from_poly(b_poly)))
    if not a_poly.is_zero:
        wb.add((0,) * (1 + n), pool.ref(_RF.from_poly(a_poly)))

    nc = len(pool.entries)
    fs = []
    for terms in rows:
        b = _RowBuilder(base, 1, n)
        for txexp, ref, sgn in terms:
            b.add(txexp, ref, sgn)
        fs.append(b.materialize(nc))

    a_amb = _ambient_rf_from_t_poly(base, 2, a_poly)
    b_amb = _ambient_rf_from_t_poly(base, 2, b_poly)
    zvar = RationalFunction.variable(base, 2, 1)
    ztilde = (zvar - a_amb) / b_amb

    z_witness = RationalFunction.from_poly(wb.materialize(nc))

    return TriangularSystem(
        place=place,
        tvars=(ztilde,),
        etas=tuple(zetas),
        fs=tuple(fs),
        coeff_field_names=(uniformizer,),
        coeff_table=tuple(pool.entries),
        zeta_indices=tuple(range(n)),
        witnesses=((gen_name, z_witness),),
    )


def _coerce_ambient(base: BaseField, nvars: int, f) -> RationalFunction:
    if isinstance(f, RationalFunction):
        if f.nvars != nvars or f.base != base:
            raise PreconditionError("element does not live in the ambient field")
        return f
    if isinstance(f, SparsePoly):
        return RationalFunction.from_poly(f)
    raise PreconditionError(f"cannot interpret {f!r} as an ambient element")


def _onehot(n: int, j: int, k: int = 1) -> tuple[int, ...]:
    e = [0] * n
    e[j] = k
    return tuple(e)


def _gamma_table(g: SparsePoly, a_poly: SparsePoly, b_poly: SparsePoly) -> list[SparsePoly]:
    """gamma_i = g^[i](a) * b^i, exact polynomials in t."""
    deg = g.degree_in(1) if not g.is_zero else -1
    out = []
    for i in range(deg + 1):
        gi = _eval_at_poly(hasse_derivative(g, i, var=1), a_poly)
        out.append(gi * (b_poly ** i))
    return out


def _min_term(gam: list[SparsePoly]) -> tuple[int, Scalar]:
    """Order and coefficient of the lowest t-term across the table; unique by separation."""
    best = None
    for gi in gam:
        if gi.is_zero:
            continue
        e = min(e[0] for e, _ in gi.terms)
        c = next(c for ee, c in gi.terms if ee[0] == e)
        if best is None or e < best[0]:
            best = (e, c)
    if best is None:
        raise PreconditionError("element vanishes identically")
    return best


def uniformize_discrete_rational(
    pres: DiscretePresentation,
    zetas,
    precision: int = DEFAULT_PRECISION,
    max_steps: int | None = None,
) -> TriangularSystem:
    """Ground certificate for requested elements of K0(t) or K0(t, z).

    Splits each element into a short relative block over K0(t), collects
    every coefficient-field element those blocks use, certifies the
    coefficients with the monomial machinery over t, and composes the two
    layers.  The result's rows have coefficients in K0 alone.
    """
    base = pres.base
    inner_order = GroupOrder(((SurdScalar.rational(1),),))
    inner_place = MonomialPlace(base, inner_order, tau=0, x_names=(pres.uniformizer,))

    if pres.min_poly is None:
        ground = [_coerce_ambient(base, 1, f) for f in zetas]
        return uniformize_abhyankar(inner_place, ground, max_steps=max_steps)

    place, conj = realize_presentation(pres, precision)
    ctx = place.make_context()
    ring = _QuotientRing(base, _poly2_to_up(_monic_min_poly(pres.min_poly)))
    requested = [_coerce_ambient(base, 2, f) for f in zetas]

    unique: list[RationalFunction] = []
    request_slot = []
    for f in requested:
        for i, known in enumerate(unique):
            if known == f:
                request_slot.append(i)
                break
        else:
            unique.append(f)
            request_slot.append(len(unique) - 1)
    zvar = RationalFunction.variable(base, 2, 1)
    if not any(f == zvar for f in unique):
        unique.append(zvar)

    pool = _CoeffPool(base)
    blocks = []
    n_total = 0
    for f in unique:
        blk = _zeta_block(pool, ring, ctx, conj, f, n_total)
        blocks.append(blk)
        n_total += len(blk.rows)

    nc = len(pool.entries)
    rows = [r for blk in blocks for r in blk.rows]
    fs = _materialize_rows(base, n_total, rows, nc)
    etas = [e for blk in blocks for e in blk.etas]

    eta_offset = []
    at = 0
    for blk in blocks:
        eta_offset.append(at + blk.zeta_eta)
        at += len(blk.etas)
    zeta_indices = tuple(eta_offset[slot] for slot in request_slot)

    # only the block for z itself reconstructs the generator; the other
    # blocks' affine rows reconstruct their own element
    witnesses = []
    z_slot = next(i for i, f in enumerate(unique) if f == zvar)
    for j_winv, b_poly, a_poly in blocks[z_slot].witness_exprs:
        witnesses.append(
            (pres.gen_name, _witness_expr(base, n_total, nc, pool, j_winv, b_poly, a_poly))
        )

    outer = TriangularSystem(
        place=place,
        tvars=(),
        etas=tuple(etas),
        fs=tuple(fs),
        coeff_field_names=(pres.uniformizer,),
        coeff_table=tuple(pool.entries),
        zeta_indices=zeta_indices,
        witnesses=tuple(witnesses),
    )

    for entry in pool.entries:
        if not _up_entry_in_ring(entry):
            raise PreconditionError(
                "a coefficient-field element of the relative system lies outside "
                "the valuation ring"
            )
    inner = uniformize_abhyankar(inner_place, list(pool.entries), max_steps=max_steps)
    return compose(outer, inner)


# ---------------------------------------------------------------------------
# Element queries used by the command-line front end


def series_element_value(place: DiscreteSeriesPlace, f: RationalFunction) -> int:
    from .errors import ValueOfZeroError

    if _coerce_ambient(place.base, place.nvars, f).is_zero:
        raise ValueOfZeroError("the zero element has no value")
    s = place.element_series(f)
    return s.known_order()


def series_element_residue(place: DiscreteSeriesPlace, f: RationalFunction) -> Scalar:
    s = place.element_series(f)
    return s.residue()
